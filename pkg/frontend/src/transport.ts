/**
 * JSON-over-CLI transport to the primary toolkit.
 *
 * Every bound operation serializes one request object, pipes it through
 * `python -m geoeval.cli op <name>`, and parses the JSON reply. Errors the
 * primary classifies as data errors (exit code 2) surface as PrimaryError
 * carrying the primary's own message verbatim.
 */

import { spawnSync } from "node:child_process";

/** Error raised by the primary component, message preserved verbatim. */
export class PrimaryError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "PrimaryError";
  }
}

const ERROR_PREFIX = "geoeval: data error: ";

export interface TransportOptions {
  /** Python interpreter launching the primary (default: $GEOEVAL_PYTHON or python3). */
  python?: string;
  /** Extra microseconds granted to large payloads; default 120 s. */
  timeoutMs?: number;
}

export function runOp<T>(
  op: string,
  request: unknown,
  options: TransportOptions = {},
): T {
  const python = options.python ?? process.env.GEOEVAL_PYTHON ?? "python3";
  const proc = spawnSync(python, ["-m", "geoeval.cli", "op", op, "--request", "-"], {
    input: JSON.stringify(request),
    encoding: "utf-8",
    maxBuffer: 256 * 1024 * 1024,
    timeout: options.timeoutMs ?? 120_000,
  });
  if (proc.error) {
    throw new Error(`failed to launch primary (${python}): ${proc.error.message}`);
  }
  if (proc.status === 2) {
    const line = (proc.stderr ?? "")
      .split("\n")
      .find((l) => l.startsWith(ERROR_PREFIX));
    throw new PrimaryError(line ? line.slice(ERROR_PREFIX.length) : proc.stderr.trim());
  }
  if (proc.status !== 0) {
    throw new Error(
      `primary exited with code ${proc.status}: ${proc.stderr?.slice(0, 2000)}`,
    );
  }
  const reply = JSON.parse(proc.stdout) as { ok: boolean; result: T };
  if (!reply.ok) {
    throw new Error("malformed reply from primary");
  }
  return reply.result;
}
