/** Client-side form validation mirroring the server's registration rules,
 * so obviously malformed input never leaves the browser. The server remains
 * the authority; these checks only short-circuit the round trip. */

import type { RegistrationForm } from "./api.js";

export const STAFF_NUMBER_RE = /^EMP\/\d{5}$/;
export const CONTACT_RE = /^\+?\d{7,15}$/;
export const MIN_PASSWORD_LENGTH = 10;

/** Exactly one "@" with nonempty text on both sides. */
export function isValidEmail(candidate: string): boolean {
  const at = candidate.indexOf("@");
  return (
    at > 0 &&
    at === candidate.lastIndexOf("@") &&
    at < candidate.length - 1
  );
}

export function isValidStaffNumber(candidate: string): boolean {
  return STAFF_NUMBER_RE.test(candidate);
}

export type FieldErrors = Partial<Record<keyof RegistrationForm, string>>;

export function validateRegistration(form: RegistrationForm): FieldErrors {
  const errors: FieldErrors = {};
  if (!form.name.trim()) errors.name = "Name is required";
  if (!isValidStaffNumber(form.staff_number)) {
    errors.staff_number = "Staff number must look like EMP/00008";
  }
  if (!isValidEmail(form.email)) {
    errors.email = "Enter a valid e-mail address";
  }
  if (!CONTACT_RE.test(form.contact_number)) {
    errors.contact_number = "Contact number must be 7–15 digits";
  }
  if (form.sex !== "Male" && form.sex !== "Female") {
    errors.sex = "Select a value";
  }
  if (form.password.length < MIN_PASSWORD_LENGTH) {
    errors.password = `Password must be at least ${MIN_PASSWORD_LENGTH} characters`;
  }
  return errors;
}

const CODE_RE = /Your one-time code is: ([A-HJ-NP-Z2-9]{8})/;

/** Pull the 8-character access code out of a mailed message body. */
export function extractAccessCode(body: string): string | null {
  const match = CODE_RE.exec(body);
  return match ? match[1] : null;
}
