/** Browser entry point: wires the hash router and form events to the
 * controller, and repaints on every store change. This is the only module
 * that touches the DOM. */

import { GatewayClient } from "./api.js";
import { ConsoleController } from "./controller.js";
import { renderApp } from "./render.js";
import { Store, type Route } from "./state.js";

const ROUTES: Record<string, Route> = {
  "": "Home",
  "#/": "Home",
  "#/home": "Home",
  "#/login": "Login",
  "#/register": "Register",
  "#/mail": "Mail",
  "#/records": "Records",
  "#/audit": "Audit",
  "#/lockdown": "Lockdown",
};

const store = new Store();
const client = new GatewayClient(window.location.origin);
const controller = new ConsoleController(client, store);
const root = document.getElementById("app")!;

store.subscribe((state) => {
  root.innerHTML = renderApp(state);
});

function routeFromHash(): Route {
  return ROUTES[window.location.hash.toLowerCase()] ?? "Home";
}

window.addEventListener("hashchange", () => {
  const target = routeFromHash();
  store.navigate(target);
  if (target === "Audit") void controller.loadAudit();
  if (target === "Records") void controller.loadRecords();
});

function formValues(form: HTMLFormElement): Record<string, string> {
  const values: Record<string, string> = {};
  new FormData(form).forEach((value, key) => {
    values[key] = String(value);
  });
  return values;
}

root.addEventListener("submit", (event) => {
  const form = event.target as HTMLFormElement;
  const action = form.dataset.action;
  if (!action) return;
  event.preventDefault();
  const v = formValues(form);
  switch (action) {
    case "submit-credentials":
      void controller.startLogin(v.staff_number, v.password);
      break;
    case "submit-code":
      void controller.submitCode(v.code);
      break;
    case "submit-registration":
      void controller.register({
        name: v.name,
        staff_number: v.staff_number,
        email: v.email,
        contact_number: v.contact_number,
        sex: v.sex,
        password: v.password,
      });
      break;
    case "mail-login":
      void controller.mailLogin(v.email, v.mail_password);
      break;
    case "seal-record":
      void controller.sealRecord(
        v.student_id,
        v.kind,
        btoa(unescape(encodeURIComponent(v.document))),
      );
      break;
    case "filter-audit":
      void controller.loadAudit({
        staff_number: v.staff_number || undefined,
        action: v.action || undefined,
      });
      break;
    case "lockdown-confirm":
      void controller.lockdownConfirm(v.confirmation_code);
      break;
  }
});

root.addEventListener("click", (event) => {
  const button = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!button || button.tagName === "FORM") return;
  switch (button.dataset.action) {
    case "logout":
      void controller.logout();
      break;
    case "request-new-code":
      void controller.requestNewCode();
      break;
    case "refresh-inbox":
      void controller.loadInbox();
      break;
    case "open-record":
      if (button.dataset.recordId) {
        void controller.openRecord(button.dataset.recordId);
      }
      break;
    case "approve": {
      const staff = button.dataset.staff;
      if (!staff) break;
      const select = root.querySelector<HTMLSelectElement>(
        `[data-role-for="${CSS.escape(staff)}"]`,
      );
      void controller.approve(
        staff,
        (select?.value as "Admin" | "Officer" | "ReadOnly") ?? "Officer",
      );
      break;
    }
    case "copy-mail-password": {
      const code = document.getElementById("mail-password");
      if (code?.textContent) {
        void navigator.clipboard.writeText(code.textContent);
      }
      break;
    }
    case "lockdown-start":
      void controller.lockdownStart();
      break;
  }
});

store.navigate(routeFromHash());
void controller.refreshHealth();
