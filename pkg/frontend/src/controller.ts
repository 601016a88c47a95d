/** Orchestrates gateway calls and store updates. All authorization decisions
 * come from the gateway's answers; the console only hides what the server
 * has already refused. */

import {
  GatewayClient,
  GatewayError,
  type RegistrationForm,
  type Role,
  type SessionView,
} from "./api.js";
import { stageFromServerState, Store } from "./state.js";
import { extractAccessCode, validateRegistration } from "./validate.js";

/** Turn a gateway failure into the message a staff member should read. */
export function noticeText(error: unknown): string {
  if (!(error instanceof GatewayError)) {
    return "The service could not be reached. Try again shortly.";
  }
  switch (error.errorCode) {
    case "TokenExpired":
      return "Your one-time code expired — request a new one.";
    case "BadToken":
      return "That code was not accepted. Check the newest message in your mailbox.";
    case "BadCredentials":
      return "Staff number or password not recognized.";
    case "IdentitySuspended":
      return "This account is locked after repeated failures. Contact an administrator.";
    case "RateLimited":
      return "Too many attempts. Wait a moment and try again.";
    case "VaultLocked":
      return "The vault is locked down; sealed documents can no longer be opened.";
    case "DuplicateStaffNumber":
      return "That staff number is already registered.";
    case "DuplicateEmail":
      return "That e-mail address is already registered.";
    case "NotAdmin":
    case "Forbidden":
      return "Your role does not allow that action.";
    case "NotAuthenticated":
      return "Your session has ended. Sign in again.";
    case "BadMailCredentials":
      return "Mailbox address or password not recognized.";
    default:
      return error.message;
  }
}

export class ConsoleController {
  constructor(
    private readonly client: GatewayClient,
    readonly store: Store,
  ) {}

  private fail(error: unknown): void {
    this.store.notify("error", noticeText(error));
    if (error instanceof GatewayError && error.errorCode === "VaultLocked") {
      this.store.update({ lockdownActive: true });
    }
    if (
      error instanceof GatewayError &&
      (error.errorCode === "NotAuthenticated" ||
        error.errorCode === "IdentitySuspended")
    ) {
      this.store.setSession(null);
    }
  }

  private applySession(view: SessionView): void {
    const stage = stageFromServerState(view.state);
    if (stage === null) {
      this.store.setSession(null);
      return;
    }
    const previous = this.store.get().session;
    this.store.setSession({
      sessionId: view.session_id,
      stage,
      staffNumber: view.staff_number,
      role: stage === "Authenticated" ? (previous?.role ?? null) : null,
    });
  }

  /** The gateway exposes no "who am I" endpoint; whether the admin list
   * answers is the server-side truth about the admin role. */
  private async probeRole(): Promise<Role | null> {
    const session = this.store.get().session;
    if (!session) return null;
    try {
      const staff = await this.client.listStaff(session.sessionId);
      this.store.update({ staff });
      return "Admin";
    } catch (error) {
      if (error instanceof GatewayError && error.status === 403) return null;
      throw error;
    }
  }

  async refreshHealth(): Promise<void> {
    try {
      const health = await this.client.health();
      this.store.update({ lockdownActive: health.vault === "Revoked" });
    } catch {
      // Health is advisory; the banner just keeps its last value.
    }
  }

  async register(form: RegistrationForm): Promise<boolean> {
    const errors = validateRegistration(form);
    const firstError = Object.values(errors)[0];
    if (firstError) {
      this.store.notify("error", firstError);
      return false;
    }
    try {
      const result = await this.client.register(form);
      this.store.update({ freshMailPassword: result.mail_password });
      this.store.notify(
        "success",
        `Registered ${result.identity.staff_number} — pending approval. ` +
          "Save your mailbox password now; it is shown only once.",
      );
      return true;
    } catch (error) {
      this.fail(error);
      return false;
    }
  }

  async startLogin(staffNumber: string, password: string): Promise<void> {
    try {
      const fresh = await this.client.beginSession();
      const view = await this.client.submitCredentials(
        fresh.session_id,
        staffNumber,
        password,
      );
      this.applySession(view);
      await this.client.requestToken(view.session_id);
      this.store.notify(
        "info",
        "A one-time code was sent to your intranet mailbox. " +
          "Open the Mail page to read it, then enter it below.",
      );
    } catch (error) {
      this.fail(error);
    }
  }

  async requestNewCode(): Promise<void> {
    const session = this.store.get().session;
    if (!session) return;
    try {
      await this.client.requestToken(session.sessionId);
      this.store.notify("info", "A new code was sent to your mailbox.");
    } catch (error) {
      this.fail(error);
    }
  }

  async submitCode(code: string): Promise<void> {
    const session = this.store.get().session;
    if (!session) return;
    try {
      const view = await this.client.verifyCode(session.sessionId, code.trim());
      this.applySession(view);
      if (view.state === "Authenticated") {
        const role = await this.probeRole();
        const current = this.store.get().session;
        if (current) this.store.setSession({ ...current, role });
        this.store.navigate("Records");
        this.store.notify("success", "Signed in.");
        await this.loadRecords();
        await this.refreshHealth();
      }
    } catch (error) {
      this.fail(error);
    }
  }

  async logout(): Promise<void> {
    const session = this.store.get().session;
    if (session) {
      try {
        await this.client.endSession(session.sessionId);
      } catch {
        // The local session is dropped regardless.
      }
    }
    this.store.setSession(null);
    this.store.navigate("Home");
  }

  async mailLogin(email: string, mailPassword: string): Promise<void> {
    try {
      const { mail_handle } = await this.client.mailLogin(email, mailPassword);
      this.store.update({ mailHandle: mail_handle });
      await this.loadInbox();
    } catch (error) {
      this.fail(error);
    }
  }

  async loadInbox(): Promise<void> {
    const handle = this.store.get().mailHandle;
    if (!handle) return;
    try {
      const inbox = await this.client.inbox(handle);
      this.store.update({ inbox });
    } catch (error) {
      if (error instanceof GatewayError && error.errorCode === "StaleHandle") {
        this.store.update({ mailHandle: null, inbox: [] });
      }
      this.fail(error);
    }
  }

  /** Newest mailed access code, for the "use latest code" shortcut. */
  latestAccessCode(): string | null {
    for (const message of this.store.get().inbox) {
      const code = extractAccessCode(message.body);
      if (code) return code;
    }
    return null;
  }

  async loadRecords(filters: { student_id?: string; kind?: string } = {}): Promise<void> {
    const session = this.store.get().session;
    if (!session) return;
    try {
      const records = await this.client.listRecords(session.sessionId, filters);
      this.store.update({ records });
    } catch (error) {
      this.fail(error);
    }
  }

  async openRecord(recordId: string): Promise<void> {
    const session = this.store.get().session;
    if (!session) return;
    try {
      const opened = await this.client.openRecord(session.sessionId, recordId);
      this.store.update({
        openedDocument: {
          recordId: opened.record_id,
          documentB64: opened.document_b64,
        },
      });
    } catch (error) {
      this.fail(error);
    }
  }

  async sealRecord(
    studentId: string,
    kind: string,
    documentB64: string,
  ): Promise<void> {
    const session = this.store.get().session;
    if (!session) return;
    try {
      await this.client.sealRecord(session.sessionId, studentId, kind, documentB64);
      this.store.notify("success", `Sealed a ${kind} record for ${studentId}.`);
      await this.loadRecords();
    } catch (error) {
      this.fail(error);
    }
  }

  async approve(staffNumber: string, role: Role): Promise<void> {
    const session = this.store.get().session;
    if (!session) return;
    try {
      await this.client.grant(session.sessionId, staffNumber, role);
      this.store.notify("success", `${staffNumber} is now an active ${role}.`);
      const staff = await this.client.listStaff(session.sessionId);
      this.store.update({ staff });
    } catch (error) {
      this.fail(error);
    }
  }

  async loadAudit(filters: { staff_number?: string; action?: string } = {}): Promise<void> {
    const session = this.store.get().session;
    if (!session) return;
    try {
      const audit = await this.client.audit(session.sessionId, filters);
      this.store.update({ audit });
    } catch (error) {
      this.fail(error);
    }
  }

  async lockdownStart(): Promise<void> {
    const session = this.store.get().session;
    if (!session) return;
    try {
      await this.client.lockdownStart(session.sessionId);
      this.store.update({ lockdownCodeRequested: true });
      this.store.notify(
        "info",
        "A confirmation code was mailed to you. Locking the vault is " +
          "IRREVERSIBLE: every sealed document becomes permanently unreadable.",
      );
    } catch (error) {
      this.fail(error);
    }
  }

  async lockdownConfirm(confirmationCode: string): Promise<void> {
    const session = this.store.get().session;
    if (!session) return;
    try {
      await this.client.lockdownConfirm(session.sessionId, confirmationCode.trim());
      this.store.update({ lockdownActive: true, lockdownCodeRequested: false });
      this.store.notify("success", "Vault locked. Key material destroyed.");
    } catch (error) {
      this.fail(error);
    }
  }
}
