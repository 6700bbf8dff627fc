/**
 * Client-side mirror of the server's upload validation, so the form can show
 * complete feedback before a byte is uploaded. The server re-checks
 * everything; these rules must match its documented rule set exactly.
 */

export interface Violation {
  rule: "filename" | "extension" | "duration" | "payload";
  message: string;
}

export const MAX_DURATION_S = 7.0;
export const ACCEPTED_EXTENSIONS = [".mp4", ".mov", ".features"];

const FILENAME_RE = /^[A-Za-z0-9][A-Za-z0-9._-]*$/;

export function validateUpload(
  filename: string,
  sizeBytes: number,
  durationS: number | null,
): Violation[] {
  const violations: Violation[] = [];
  if (!FILENAME_RE.test(filename)) {
    violations.push({
      rule: "filename",
      message:
        "Filename must start with a letter or digit and contain only letters, numbers, and - _ .",
    });
  }
  const lower = filename.toLowerCase();
  if (!ACCEPTED_EXTENSIONS.some((ext) => lower.endsWith(ext))) {
    violations.push({
      rule: "extension",
      message: `Acceptable formats: ${ACCEPTED_EXTENSIONS.join(", ")}`,
    });
  }
  if (durationS !== null && durationS > MAX_DURATION_S) {
    violations.push({
      rule: "duration",
      message: `Please keep the video under ${MAX_DURATION_S} seconds (got ${durationS.toFixed(1)}s)`,
    });
  }
  if (sizeBytes <= 0) {
    violations.push({ rule: "payload", message: "The chosen file is empty" });
  }
  return violations;
}
