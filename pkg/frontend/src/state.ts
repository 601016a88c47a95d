/** In-memory view state for the console. The session id lives only here —
 * never in localStorage, sessionStorage, cookies or the URL — so closing the
 * tab ends the session from the browser's point of view. */

import type {
  AuditRow,
  IdentityView,
  MailMessage,
  RecordMeta,
  Role,
  SessionState,
} from "./api.js";

export type Route =
  | "Home"
  | "Login"
  | "Register"
  | "Mail"
  | "Records"
  | "Audit"
  | "Lockdown";

export type Stage = "Credentials" | "Token" | "Authenticated";

export interface SessionInfo {
  sessionId: string;
  stage: Stage;
  staffNumber: string | null;
  /** Known only after the gateway confirms it (admin endpoints answering). */
  role: Role | null;
}

export interface Notice {
  kind: "info" | "success" | "error";
  text: string;
}

export interface ViewState {
  route: Route;
  session: SessionInfo | null;
  notices: Notice[];
  lockdownActive: boolean;
  /** One-time mail password to show right after registration. */
  freshMailPassword: string | null;
  mailHandle: string | null;
  inbox: MailMessage[];
  records: RecordMeta[];
  openedDocument: { recordId: string; documentB64: string } | null;
  staff: IdentityView[];
  audit: AuditRow[];
  lockdownCodeRequested: boolean;
}

export function initialState(): ViewState {
  return {
    route: "Home",
    session: null,
    notices: [],
    lockdownActive: false,
    freshMailPassword: null,
    mailHandle: null,
    inbox: [],
    records: [],
    openedDocument: null,
    staff: [],
    audit: [],
    lockdownCodeRequested: false,
  };
}

const AUTHENTICATED_ROUTES: ReadonlySet<Route> = new Set([
  "Records",
  "Audit",
  "Lockdown",
]);
const ADMIN_ROUTES: ReadonlySet<Route> = new Set(["Audit", "Lockdown"]);

export function stageFromServerState(state: SessionState): Stage | null {
  switch (state) {
    case "AwaitingCredentials":
      return "Credentials";
    case "CredentialsVerified":
    case "TokenIssued":
      return "Token";
    case "Authenticated":
      return "Authenticated";
    case "Terminated":
      return null;
  }
}

export function canView(route: Route, state: ViewState): boolean {
  if (AUTHENTICATED_ROUTES.has(route)) {
    if (state.session?.stage !== "Authenticated") return false;
    if (ADMIN_ROUTES.has(route) && state.session.role !== "Admin") return false;
  }
  return true;
}

/** Navigation entries, in display order, for the current state. */
export function visibleRoutes(state: ViewState): Route[] {
  const all: Route[] = [
    "Home",
    "Login",
    "Register",
    "Mail",
    "Records",
    "Audit",
    "Lockdown",
  ];
  return all.filter((route) => canView(route, state));
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = initialState();
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<ViewState>): ViewState {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
    return this.state;
  }

  /** Route change; guarded routes silently fall back to Login. */
  navigate(route: Route): ViewState {
    if (!canView(route, this.state)) {
      return this.update({
        route: "Login",
        notices: [
          ...this.state.notices,
          { kind: "info", text: "Sign in to open that page." },
        ],
      });
    }
    return this.update({ route, notices: [] });
  }

  notify(kind: Notice["kind"], text: string): ViewState {
    return this.update({ notices: [...this.state.notices, { kind, text }] });
  }

  clearNotices(): ViewState {
    return this.update({ notices: [] });
  }

  setSession(session: SessionInfo | null): ViewState {
    const next: Partial<ViewState> = { session };
    // Losing authentication tears down everything fetched under it.
    if (!session || session.stage !== "Authenticated") {
      next.records = [];
      next.openedDocument = null;
      next.staff = [];
      next.audit = [];
      next.lockdownCodeRequested = false;
      if (this.state.route !== "Login" && !canView(this.state.route, {
        ...this.state,
        session: session ?? null,
      })) {
        next.route = "Login";
      }
    }
    return this.update(next);
  }
}
