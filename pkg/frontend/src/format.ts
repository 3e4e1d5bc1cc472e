/**
 * Number-to-text rendering that byte-matches the backend's JSON.
 *
 * The backend serializes doubles with Python's shortest-round-trip repr.
 * JavaScript's String() is also shortest-round-trip but differs in three
 * spots: integral floats drop the ".0", the switch to exponent notation
 * happens at different magnitudes (1e21/1e-7 vs 1e16/1e-5), and one-digit
 * exponents are not zero-padded. This formatter closes those gaps so a
 * score shown in the UI is the exact substring of the payload it came from.
 */

export function formatScore(value: number): string {
  if (!Number.isFinite(value)) {
    return String(value);
  }
  if (value === 0) {
    return Object.is(value, -0) ? "-0.0" : "0.0";
  }
  const magnitude = Math.abs(value);
  if (magnitude >= 1e16 || magnitude < 1e-4) {
    return padExponent(value.toExponential());
  }
  if (Number.isInteger(value)) {
    return value.toFixed(1);
  }
  return String(value);
}

function padExponent(text: string): string {
  const match = /^(-?[^e]+)e([+-])(\d+)$/.exec(text);
  if (!match) {
    return text;
  }
  const [, mantissa, sign, digits] = match;
  const padded = digits!.length < 2 ? `0${digits}` : digits!;
  return `${mantissa}e${sign}${padded}`;
}
