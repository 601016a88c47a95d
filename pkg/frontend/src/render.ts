/** Pure HTML rendering: ViewState in, markup string out. No DOM access, so
 * every screen is testable as a plain function. Interactive elements carry
 * data-action attributes that main.ts wires to the controller. */

import type { Notice, Route, ViewState } from "./state.js";
import { visibleRoutes } from "./state.js";

export const RECORD_KINDS = [
  "LevelResult",
  "CumulativeResult",
  "TranscriptIncoming",
  "TranscriptOutgoing",
  "EntryVerification",
] as const;

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function formatWhen(epochSeconds: number): string {
  return new Date(epochSeconds * 1000).toISOString().replace("T", " ").slice(0, 19);
}

export function renderNotices(notices: Notice[]): string {
  if (!notices.length) return "";
  const items = notices
    .map(
      (n) =>
        `<div class="notice notice-${n.kind}" role="alert">${escapeHtml(n.text)}</div>`,
    )
    .join("");
  return `<section class="notices">${items}</section>`;
}

export function renderLockdownBanner(state: ViewState): string {
  if (!state.lockdownActive) return "";
  return (
    '<div class="banner banner-lockdown" role="alert">' +
    "Vault locked down: sealed documents are permanently unreadable. " +
    "Only record metadata remains available.</div>"
  );
}

export function renderNav(state: ViewState): string {
  const links = visibleRoutes(state)
    .map((route) => {
      const active = route === state.route ? ' class="active"' : "";
      return `<a href="#/${route.toLowerCase()}"${active}>${route}</a>`;
    })
    .join("");
  const who = state.session?.staffNumber
    ? `<span class="whoami">${escapeHtml(state.session.staffNumber)}</span>` +
      '<button data-action="logout">Sign out</button>'
    : "";
  return `<nav>${links}${who}</nav>`;
}

function renderHome(state: ViewState): string {
  const signedIn = state.session?.stage === "Authenticated";
  return `
    <h1>Examinations &amp; Records Console</h1>
    <p>Staff portal for sealed student records. ${
      signedIn
        ? 'Open your <a href="#/records">records dashboard</a>.'
        : 'Existing staff <a href="#/login">sign in</a>; new staff ' +
          '<a href="#/register">register</a> and wait for approval.'
    }</p>
    <ul>
      <li>Signing in takes two steps: your password, then a one-time code
          delivered to your intranet mailbox.</li>
      <li>Codes expire after a few minutes and work exactly once.</li>
    </ul>`;
}

function renderLogin(state: ViewState): string {
  const stage = state.session?.stage;
  if (stage === "Token") {
    return `
      <h1>Enter your one-time code</h1>
      <p>We mailed an 8-character code to your intranet mailbox.
         Read it on the <a href="#/mail">Mail</a> page.</p>
      <form data-action="submit-code">
        <label>One-time code
          <input name="code" autocomplete="one-time-code" maxlength="8" required />
        </label>
        <button type="submit">Verify</button>
      </form>
      <button data-action="request-new-code">Request a new code</button>`;
  }
  if (stage === "Authenticated") {
    return `<h1>Signed in</h1>
      <p>You are signed in as ${escapeHtml(state.session?.staffNumber ?? "")}.
         Go to <a href="#/records">Records</a>.</p>`;
  }
  return `
    <h1>Staff sign in</h1>
    <form data-action="submit-credentials">
      <label>Staff number
        <input name="staff_number" placeholder="EMP/00008" required />
      </label>
      <label>Password
        <input name="password" type="password" autocomplete="current-password" required />
      </label>
      <button type="submit">Continue</button>
    </form>
    <p>No account? <a href="#/register">Register</a>.</p>`;
}

function renderRegister(state: ViewState): string {
  const mailPassword = state.freshMailPassword
    ? `<div class="mail-password">
         <p>Your intranet mailbox password (shown once):</p>
         <code id="mail-password">${escapeHtml(state.freshMailPassword)}</code>
         <button data-action="copy-mail-password">Copy</button>
       </div>`
    : "";
  return `
    <h1>Staff registration</h1>
    <p>Accounts start read-only and pending until an administrator approves them.</p>
    <form data-action="submit-registration">
      <label>Staff name <input name="name" required /></label>
      <label>Staff number
        <input name="staff_number" placeholder="EMP/00008"
               pattern="EMP/[0-9]{5}" required />
      </label>
      <label>E-mail address <input name="email" type="email" required /></label>
      <label>Contact number
        <input name="contact_number" placeholder="+2348012345" required />
      </label>
      <label>Sex
        <select name="sex" required>
          <option value="Female">Female</option>
          <option value="Male">Male</option>
        </select>
      </label>
      <label>Password
        <input name="password" type="password" minlength="10"
               autocomplete="new-password" required />
      </label>
      <button type="submit">Register</button>
    </form>
    ${mailPassword}`;
}

function renderMail(state: ViewState): string {
  if (!state.mailHandle) {
    return `
      <h1>Intranet mailbox</h1>
      <form data-action="mail-login">
        <label>E-mail address <input name="email" required /></label>
        <label>Mailbox password
          <input name="mail_password" type="password" required />
        </label>
        <button type="submit">Open mailbox</button>
      </form>`;
  }
  const rows = state.inbox
    .map(
      (m) => `
      <tr class="${m.read ? "read" : "unread"}">
        <td>${formatWhen(m.delivered_at)}</td>
        <td>${escapeHtml(m.subject)}</td>
        <td><pre>${escapeHtml(m.body)}</pre></td>
      </tr>`,
    )
    .join("");
  return `
    <h1>Inbox</h1>
    <button data-action="refresh-inbox">Refresh</button>
    <table class="inbox">
      <thead><tr><th>Delivered</th><th>Subject</th><th>Message</th></tr></thead>
      <tbody>${rows || '<tr><td colspan="3">No messages.</td></tr>'}</tbody>
    </table>`;
}

function renderRecords(state: ViewState): string {
  const rows = state.records
    .map(
      (r) => `
      <tr>
        <td>${escapeHtml(r.record_id)}</td>
        <td>${escapeHtml(r.student_id)}</td>
        <td>${escapeHtml(r.kind)}</td>
        <td>${escapeHtml(r.created_by)}</td>
        <td>${formatWhen(r.created_at)}</td>
        <td><button data-action="open-record" data-record-id="${escapeHtml(r.record_id)}"
              ${state.lockdownActive ? "disabled" : ""}>Open</button></td>
      </tr>`,
    )
    .join("");
  const kindOptions = RECORD_KINDS.map(
    (k) => `<option value="${k}">${k}</option>`,
  ).join("");
  const opened = state.openedDocument
    ? `<section class="opened-document">
         <h2>Document ${escapeHtml(state.openedDocument.recordId)}</h2>
         <pre>${escapeHtml(decodeDocument(state.openedDocument.documentB64))}</pre>
       </section>`
    : "";
  return `
    <h1>Sealed records</h1>
    <table class="records">
      <thead><tr><th>Record</th><th>Student</th><th>Kind</th>
        <th>Sealed by</th><th>Sealed at</th><th></th></tr></thead>
      <tbody>${rows || '<tr><td colspan="6">No records.</td></tr>'}</tbody>
    </table>
    ${opened}
    <h2>Seal a new record</h2>
    <form data-action="seal-record">
      <label>Student ID <input name="student_id" required /></label>
      <label>Kind <select name="kind">${kindOptions}</select></label>
      <label>Document text <textarea name="document" required></textarea></label>
      <button type="submit" ${state.lockdownActive ? "disabled" : ""}>Seal</button>
    </form>`;
}

interface BufferLike {
  from(data: string, encoding: string): { toString(encoding: string): string };
}

function decodeDocument(b64: string): string {
  try {
    // atob exists in browsers; node-side tests decode via Buffer instead.
    if (typeof atob === "function") return atob(b64);
    const nodeBuffer = (globalThis as { Buffer?: BufferLike }).Buffer;
    if (nodeBuffer) return nodeBuffer.from(b64, "base64").toString("binary");
    return "(binary document)";
  } catch {
    return "(binary document)";
  }
}

function renderAudit(state: ViewState): string {
  const rows = state.audit
    .map(
      (e) => `
      <tr class="${e.outcome === "Failure" ? "failure" : "success"}">
        <td>${e.seq}</td>
        <td>${formatWhen(e.timestamp_ms / 1000)}</td>
        <td>${escapeHtml(e.staff_number)}</td>
        <td>${escapeHtml(e.action)}</td>
        <td>${escapeHtml(e.outcome)}</td>
        <td>${escapeHtml(e.detail)}</td>
      </tr>`,
    )
    .join("");
  return `
    <h1>Audit trail</h1>
    <form data-action="filter-audit">
      <label>Staff number <input name="staff_number" /></label>
      <label>Action <input name="action" /></label>
      <button type="submit">Filter</button>
    </form>
    <table class="audit">
      <thead><tr><th>#</th><th>When</th><th>Staff</th>
        <th>Action</th><th>Outcome</th><th>Detail</th></tr></thead>
      <tbody>${rows || '<tr><td colspan="6">No entries.</td></tr>'}</tbody>
    </table>
    <h2>Pending approvals</h2>
    ${renderStaffList(state)}`;
}

function renderStaffList(state: ViewState): string {
  const rows = state.staff
    .map(
      (s) => `
      <tr>
        <td>${escapeHtml(s.staff_number)}</td>
        <td>${escapeHtml(s.name)}</td>
        <td>${escapeHtml(s.role)}</td>
        <td>${escapeHtml(s.status)}</td>
        <td>
          <select data-role-for="${escapeHtml(s.staff_number)}">
            <option>Officer</option><option>ReadOnly</option><option>Admin</option>
          </select>
          <button data-action="approve" data-staff="${escapeHtml(s.staff_number)}">
            Approve</button>
        </td>
      </tr>`,
    )
    .join("");
  return `<table class="staff">
    <thead><tr><th>Staff</th><th>Name</th><th>Role</th><th>Status</th><th></th></tr></thead>
    <tbody>${rows || '<tr><td colspan="5">No staff loaded.</td></tr>'}</tbody>
  </table>`;
}

function renderLockdown(state: ViewState): string {
  if (state.lockdownActive) {
    return `<h1>Vault lockdown</h1>
      <p>The vault is already locked. This cannot be undone.</p>`;
  }
  if (!state.lockdownCodeRequested) {
    return `
      <h1>Vault lockdown</h1>
      <p class="warning">Locking the vault destroys the master key.
        Every sealed document becomes <strong>permanently unreadable</strong>.
        There is no undo.</p>
      <button data-action="lockdown-start">Request confirmation code</button>`;
  }
  return `
    <h1>Confirm lockdown</h1>
    <p class="warning">Enter the confirmation code from your mailbox to
      destroy the master key. This is irreversible.</p>
    <form data-action="lockdown-confirm">
      <label>Confirmation code
        <input name="confirmation_code" maxlength="8" required />
      </label>
      <button type="submit">Lock the vault forever</button>
    </form>`;
}

const PAGES: Record<Route, (state: ViewState) => string> = {
  Home: renderHome,
  Login: renderLogin,
  Register: renderRegister,
  Mail: renderMail,
  Records: renderRecords,
  Audit: renderAudit,
  Lockdown: renderLockdown,
};

export function renderApp(state: ViewState): string {
  return `
    ${renderLockdownBanner(state)}
    ${renderNav(state)}
    ${renderNotices(state.notices)}
    <main>${PAGES[state.route](state)}</main>`;
}
