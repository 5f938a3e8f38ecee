/** Client-side descriptor validation mirroring the server's rules.
 *
 * The server stays authoritative; this exists so the form can show inline
 * messages and keep the submit button disabled until the vector would pass.
 */

import type { AttributeInfo } from "./types.js";

export interface FieldIssue {
  index: number; // 1-based attribute position
  name: string;
  message: string;
}

/** Parse one form field; empty or non-numeric text yields null. */
export function parseField(text: string): number | null {
  const trimmed = text.trim();
  if (trimmed === "") return null;
  const value = Number(trimmed);
  return Number.isNaN(value) ? null : value;
}

export function validateDescriptors(
  schema: AttributeInfo[],
  values: (number | null)[],
): FieldIssue[] {
  const issues: FieldIssue[] = [];
  if (values.length !== schema.length) {
    issues.push({
      index: 0,
      name: "descriptors",
      message: `expected ${schema.length} values, got ${values.length}`,
    });
    return issues;
  }
  schema.forEach((attr, i) => {
    const value = values[i];
    if (value === null) {
      issues.push({ index: attr.index, name: attr.name, message: "required" });
    } else if (!Number.isFinite(value)) {
      issues.push({ index: attr.index, name: attr.name, message: "not finite" });
    } else if (value < 0) {
      issues.push({ index: attr.index, name: attr.name, message: "must not be negative" });
    }
  });
  return issues;
}

export function canSubmit(schema: AttributeInfo[], values: (number | null)[]): boolean {
  return validateDescriptors(schema, values).length === 0;
}
