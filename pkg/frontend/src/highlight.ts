/** Split a query sentence into character segments so substituted tokens
 *  (the chain's positions) can be wrapped in highlight spans. Token
 *  boundaries mirror the service's published tokenization: whitespace
 *  split, leading/trailing punctuation peeled into their own tokens. */

import type { ChainStep } from "./api.js";

const PUNCT = new Set([...".,!?;:'\"()[]{}"]);

export interface Segment {
  text: string;
  tokenIndex: number | null; // null for whitespace between tokens
  highlighted: boolean;
}

export function splitTokens(text: string): string[] {
  const tokens: string[] = [];
  for (const chunk of text.split(/\s+/).filter((c) => c.length > 0)) {
    let core = chunk;
    const leading: string[] = [];
    const trailing: string[] = [];
    while (core.length > 0 && PUNCT.has(core[0]!)) {
      leading.push(core[0]!);
      core = core.slice(1);
    }
    while (core.length > 0 && PUNCT.has(core[core.length - 1]!)) {
      trailing.push(core[core.length - 1]!);
      core = core.slice(0, -1);
    }
    tokens.push(...leading);
    if (core.length > 0) tokens.push(core);
    tokens.push(...trailing.reverse());
  }
  return tokens;
}

/** Positions substituted by the chain, each with its operator history in
 *  application order (a position can be rewritten more than once). */
export function substitutedPositions(chain: ChainStep[]): Map<number, ChainStep[]> {
  const byPosition = new Map<number, ChainStep[]>();
  for (const step of chain) {
    const steps = byPosition.get(step.position) ?? [];
    steps.push(step);
    byPosition.set(step.position, steps);
  }
  return byPosition;
}

export function highlightSegments(text: string, chain: ChainStep[]): Segment[] {
  const tokens = splitTokens(text);
  const marked = substitutedPositions(chain);
  const segments: Segment[] = [];
  let cursor = 0;
  tokens.forEach((token, index) => {
    const at = text.indexOf(token, cursor);
    if (at < 0) return; // defensive: malformed wire text
    if (at > cursor) {
      segments.push({ text: text.slice(cursor, at), tokenIndex: null, highlighted: false });
    }
    segments.push({ text: token, tokenIndex: index, highlighted: marked.has(index) });
    cursor = at + token.length;
  });
  if (cursor < text.length) {
    segments.push({ text: text.slice(cursor), tokenIndex: null, highlighted: false });
  }
  return segments;
}
