import { describe, expect, it } from "vitest";

import {
  escapeHtml,
  renderApp,
  renderLockdownBanner,
  renderNav,
} from "../src/render.js";
import { initialState, type SessionInfo, type ViewState } from "../src/state.js";

function withSession(partial: Partial<SessionInfo>, state?: Partial<ViewState>): ViewState {
  return {
    ...initialState(),
    session: {
      sessionId: "s-1",
      stage: "Authenticated",
      staffNumber: "EMP/00008",
      role: null,
      ...partial,
    },
    ...state,
  };
}

describe("navigation rendering", () => {
  it("omits admin links for non-admins", () => {
    const html = renderNav(withSession({ role: "Officer" }));
    expect(html).toContain("#/records");
    expect(html).not.toContain("#/audit");
    expect(html).not.toContain("#/lockdown");
  });

  it("includes admin links and a sign-out control for admins", () => {
    const html = renderNav(withSession({ role: "Admin" }));
    expect(html).toContain("#/audit");
    expect(html).toContain("#/lockdown");
    expect(html).toContain('data-action="logout"');
    expect(html).toContain("EMP/00008");
  });
});

describe("login screen", () => {
  it("renders the credentials form before step one", () => {
    const html = renderApp({ ...initialState(), route: "Login" });
    expect(html).toContain('name="staff_number"');
    expect(html).toContain('name="password"');
    expect(html).not.toContain('name="code"');
  });

  it("renders the token form only at the Token stage", () => {
    const html = renderApp({
      ...withSession({ stage: "Token" }),
      route: "Login",
    });
    expect(html).toContain('name="code"');
    expect(html).toContain('data-action="request-new-code"');
    expect(html).not.toContain('name="password"');
  });
});

describe("lockdown banner", () => {
  it("is absent while the vault is active", () => {
    expect(renderLockdownBanner(initialState())).toBe("");
  });

  it("appears on every page once the vault is revoked", () => {
    for (const route of ["Home", "Login", "Mail"] as const) {
      const html = renderApp({
        ...initialState(),
        route,
        lockdownActive: true,
      });
      expect(html).toContain("banner-lockdown");
      expect(html).toContain("permanently unreadable");
    }
  });

  it("disables the open and seal controls", () => {
    const html = renderApp({
      ...withSession({ role: "Officer" }),
      route: "Records",
      lockdownActive: true,
      records: [
        {
          record_id: "r1",
          student_id: "S1",
          kind: "LevelResult",
          created_by: "EMP/00008",
          created_at: 0,
        },
      ],
    });
    expect(html).toMatch(/data-record-id="r1"\s+disabled/);
  });
});

describe("output hygiene", () => {
  it("escapes markup in user-controlled fields", () => {
    expect(escapeHtml('<img src=x onerror="1">')).not.toContain("<img");
    const html = renderApp({
      ...initialState(),
      route: "Home",
      notices: [{ kind: "error", text: '<script>alert(1)</script>' }],
    });
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;");
  });

  it("shows the one-time mail password with a copy control after registration", () => {
    const html = renderApp({
      ...initialState(),
      route: "Register",
      freshMailPassword: "pw-shown-once",
    });
    expect(html).toContain("pw-shown-once");
    expect(html).toContain('data-action="copy-mail-password"');
  });
});
