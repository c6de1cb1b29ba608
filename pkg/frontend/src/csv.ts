/** Parser for the service's envelope CSV. */

export interface EnvelopeRow {
  p: number;
  deltaPlusOuter: number;
  deltaPlusInner: number;
  deltaMinusOuter: number;
  deltaMinusInner: number;
}

const HEADER =
  "p,delta_plus_outer,delta_plus_inner,delta_minus_outer,delta_minus_inner";

export function parseEnvelopeCsv(text: string): EnvelopeRow[] {
  const lines = text.trim().split("\n");
  if (lines[0] !== HEADER) {
    throw new Error(`unexpected envelope header: ${lines[0]}`);
  }
  return lines.slice(1).map((line) => {
    const cells = line.split(",").map(Number);
    if (cells.length !== 5 || cells.some(Number.isNaN)) {
      throw new Error(`bad envelope row: ${line}`);
    }
    return {
      p: cells[0],
      deltaPlusOuter: cells[1],
      deltaPlusInner: cells[2],
      deltaMinusOuter: cells[3],
      deltaMinusInner: cells[4],
    };
  });
}
