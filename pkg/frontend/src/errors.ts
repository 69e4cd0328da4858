/** Typed failures with the exit codes the command line maps them to. */

/** Bad invocation or malformed input data. Exits 2. */
export class DataError extends Error {
  readonly exitCode = 2;
  constructor(message: string) {
    super(message);
    this.name = "DataError";
  }
}

/** Missing files, unreadable models, broken working directories. Exits 3. */
export class EnvironmentError extends Error {
  readonly exitCode = 3;
  constructor(message: string) {
    super(message);
    this.name = "EnvironmentError";
  }
}

/** Numerical breakdown: divergence, NaN loss, no usable model. Exits 4. */
export class NumericalError extends Error {
  readonly exitCode = 4;
  constructor(message: string) {
    super(message);
    this.name = "NumericalError";
  }
}

export type CodecFailure = DataError | EnvironmentError | NumericalError;

export function exitCodeFor(err: unknown): number {
  if (
    err instanceof DataError ||
    err instanceof EnvironmentError ||
    err instanceof NumericalError
  ) {
    return err.exitCode;
  }
  return 1;
}
