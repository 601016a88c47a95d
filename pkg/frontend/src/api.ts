/** Typed client for the gateway's JSON API. Every console action goes
 * through this module; nothing here touches the DOM or browser storage. */

export type SessionState =
  | "AwaitingCredentials"
  | "CredentialsVerified"
  | "TokenIssued"
  | "Authenticated"
  | "Terminated";

export type Role = "Admin" | "Officer" | "ReadOnly";

export interface SessionView {
  session_id: string;
  state: SessionState;
  staff_number: string | null;
  access_granted_at: number | null;
  failed_attempts: number;
}

export interface IdentityView {
  staff_number: string;
  name: string;
  email: string;
  contact_number: string;
  sex: string;
  role: Role;
  status: "PendingApproval" | "Active" | "Suspended";
  created_at: number;
}

export interface RegisterResult {
  identity: IdentityView;
  mail_password: string;
}

export interface RecordMeta {
  record_id: string;
  student_id: string;
  kind: string;
  created_by: string;
  created_at: number;
}

export interface AuditRow {
  seq: number;
  timestamp_ms: number;
  staff_number: string;
  action: string;
  outcome: string;
  detail: string;
  prev_hash: string;
  entry_hash: string;
}

export interface MailMessage {
  message_id: string;
  delivered_at: number;
  subject: string;
  body: string;
  read: boolean;
}

export interface HealthView {
  status: string;
  vault: "Active" | "Revoked";
  journal_entries: number;
}

export interface RegistrationForm {
  name: string;
  staff_number: string;
  email: string;
  contact_number: string;
  sex: string;
  password: string;
}

export class GatewayError extends Error {
  constructor(
    readonly status: number,
    readonly errorCode: string,
    message: string,
  ) {
    super(message);
    this.name = "GatewayError";
  }
}

interface RequestOptions {
  json?: unknown;
  sessionId?: string;
  mailHandle?: string;
  query?: Record<string, string | undefined>;
}

export class GatewayClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    opts: RequestOptions = {},
  ): Promise<T> {
    const headers: Record<string, string> = {};
    let body: string | undefined;
    if (opts.json !== undefined) {
      headers["Content-Type"] = "application/json";
      body = JSON.stringify(opts.json);
    }
    if (opts.sessionId) headers["Authorization"] = `Bearer ${opts.sessionId}`;
    if (opts.mailHandle) headers["X-Mail-Handle"] = opts.mailHandle;
    let url = this.baseUrl.replace(/\/$/, "") + path;
    if (opts.query) {
      const params = new URLSearchParams();
      for (const [key, value] of Object.entries(opts.query)) {
        if (value !== undefined) params.set(key, value);
      }
      const qs = params.toString();
      if (qs) url += `?${qs}`;
    }
    const resp = await this.fetchFn(url, { method, headers, body });
    const text = await resp.text();
    const payload = text ? JSON.parse(text) : {};
    if (!resp.ok) {
      throw new GatewayError(
        resp.status,
        typeof payload.error_code === "string" ? payload.error_code : "Unknown",
        typeof payload.message === "string" ? payload.message : resp.statusText,
      );
    }
    return payload as T;
  }

  health(): Promise<HealthView> {
    return this.request("GET", "/api/health");
  }

  register(form: RegistrationForm): Promise<RegisterResult> {
    return this.request("POST", "/api/register", { json: form });
  }

  beginSession(): Promise<SessionView> {
    return this.request("POST", "/api/session");
  }

  submitCredentials(
    sessionId: string,
    staffNumber: string,
    password: string,
  ): Promise<SessionView> {
    return this.request("POST", `/api/session/${sessionId}/credentials`, {
      json: { staff_number: staffNumber, password },
    });
  }

  requestToken(sessionId: string): Promise<SessionView> {
    return this.request("POST", `/api/session/${sessionId}/token`);
  }

  verifyCode(sessionId: string, code: string): Promise<SessionView> {
    return this.request("POST", `/api/session/${sessionId}/verify`, {
      json: { code },
    });
  }

  endSession(sessionId: string): Promise<SessionView> {
    return this.request("DELETE", `/api/session/${sessionId}`);
  }

  grant(
    sessionId: string,
    staffNumber: string,
    role: Role,
  ): Promise<IdentityView> {
    return this.request("POST", `/api/staff/${staffNumber}/grant`, {
      sessionId,
      json: { role },
    });
  }

  listStaff(sessionId: string): Promise<IdentityView[]> {
    return this.request("GET", "/api/staff", { sessionId });
  }

  listRecords(
    sessionId: string,
    filters: { student_id?: string; kind?: string } = {},
  ): Promise<RecordMeta[]> {
    return this.request("GET", "/api/records", { sessionId, query: filters });
  }

  sealRecord(
    sessionId: string,
    studentId: string,
    kind: string,
    documentB64: string,
  ): Promise<RecordMeta> {
    return this.request("POST", "/api/records", {
      sessionId,
      json: { student_id: studentId, kind, document_b64: documentB64 },
    });
  }

  openRecord(
    sessionId: string,
    recordId: string,
  ): Promise<{ record_id: string; document_b64: string }> {
    return this.request("GET", `/api/records/${recordId}`, { sessionId });
  }

  lockdownStart(sessionId: string): Promise<{ status: string }> {
    return this.request("POST", "/api/lockdown", { sessionId, json: {} });
  }

  lockdownConfirm(
    sessionId: string,
    confirmationCode: string,
  ): Promise<{ state: string; revoked_by?: string }> {
    return this.request("POST", "/api/lockdown", {
      sessionId,
      json: { confirmation_code: confirmationCode },
    });
  }

  audit(
    sessionId: string,
    filters: {
      staff_number?: string;
      action?: string;
      from_ms?: string;
      to_ms?: string;
    } = {},
  ): Promise<AuditRow[]> {
    return this.request("GET", "/api/audit", { sessionId, query: filters });
  }

  mailLogin(email: string, mailPassword: string): Promise<{ mail_handle: string }> {
    return this.request("POST", "/api/mail/login", {
      json: { email, mail_password: mailPassword },
    });
  }

  inbox(mailHandle: string, unreadOnly = false): Promise<MailMessage[]> {
    return this.request("GET", "/api/mail/inbox", {
      mailHandle,
      query: unreadOnly ? { unread_only: "true" } : {},
    });
  }
}
