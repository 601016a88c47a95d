import { describe, expect, it } from "vitest";

import type { RegistrationForm } from "../src/api.js";
import {
  extractAccessCode,
  isValidEmail,
  isValidStaffNumber,
  validateRegistration,
} from "../src/validate.js";

const GOOD_FORM: RegistrationForm = {
  name: "A. Person",
  staff_number: "EMP/00008",
  email: "a.person@intra.local",
  contact_number: "+2348012345",
  sex: "Female",
  password: "a-long-password",
};

describe("staff number validation", () => {
  it("accepts the canonical form", () => {
    expect(isValidStaffNumber("EMP/00008")).toBe(true);
  });

  it.each(["", "EMP/123456", "EMP/1234", "emp/00008", "EMP-00008", "EMP/0000a"])(
    "rejects %j",
    (bad) => {
      expect(isValidStaffNumber(bad)).toBe(false);
    },
  );
});

describe("email validation", () => {
  it("requires exactly one @ with nonempty sides", () => {
    expect(isValidEmail("a@b")).toBe(true);
    expect(isValidEmail("no-at-sign")).toBe(false);
    expect(isValidEmail("@b")).toBe(false);
    expect(isValidEmail("a@")).toBe(false);
    expect(isValidEmail("a@@b")).toBe(false);
  });
});

describe("registration form validation", () => {
  it("passes a well-formed form", () => {
    expect(validateRegistration(GOOD_FORM)).toEqual({});
  });

  it("flags a malformed email before any request is made", () => {
    const errors = validateRegistration({ ...GOOD_FORM, email: "no-at-sign" });
    expect(errors.email).toBeTruthy();
  });

  it("flags a short password", () => {
    const errors = validateRegistration({ ...GOOD_FORM, password: "short" });
    expect(errors.password).toMatch(/10/);
  });

  it("flags a bad staff number with the expected mask", () => {
    const errors = validateRegistration({
      ...GOOD_FORM,
      staff_number: "EMP/123456",
    });
    expect(errors.staff_number).toMatch(/EMP\/00008/);
  });

  it("flags a bad contact number", () => {
    const errors = validateRegistration({
      ...GOOD_FORM,
      contact_number: "12-34",
    });
    expect(errors.contact_number).toBeTruthy();
  });
});

describe("access code extraction", () => {
  it("pulls the code out of a delivery message", () => {
    expect(
      extractAccessCode("Your one-time code is: ABCD2345 (valid 300s)"),
    ).toBe("ABCD2345");
  });

  it("ignores bodies without a code", () => {
    expect(extractAccessCode("Nothing to see here")).toBeNull();
  });

  it("ignores codes using excluded characters", () => {
    expect(
      extractAccessCode("Your one-time code is: ABCD0145 (valid 300s)"),
    ).toBeNull();
  });
});
