/** Symbol palette and ASCII auto-expansion for the tactic input box.
 *
 * Expansions follow the unicode input table (backslash-prefixed names) plus
 * the assertion-language ASCII fallbacks.
 */

export interface PaletteEntry {
  symbol: string;
  hint: string;
}

export const PALETTE: PaletteEntry[] = [
  { symbol: "↦", hint: "points-to" },
  { symbol: "∗", hint: "separating conjunction" },
  { symbol: "-∗", hint: "magic wand" },
  { symbol: "⌜", hint: "pure embedding (open)" },
  { symbol: "⌝", hint: "pure embedding (close)" },
  { symbol: "▷", hint: "later" },
  { symbol: "●E", hint: "authoritative part" },
  { symbol: "◯E", hint: "fragment part" },
  { symbol: "∃", hint: "exists" },
  { symbol: "∀", hint: "forall" },
  { symbol: "Φ", hint: "postcondition predicate" },
  { symbol: "ℓ", hint: "location" },
  { symbol: "γ", hint: "ghost name" },
  { symbol: "|==>", hint: "update modality" },
];

/** Backslash input-method expansions, longest name first. */
const BACKSLASH: [string, string][] = [
  ["\\mapsto", "↦"],
  ["\\star", "∗"],
  ["\\wand", "-∗"],
  ["\\later", "▷"],
  ["\\auth", "●E"],
  ["\\frag", "◯E"],
  ["\\lc", "⌜"],
  ["\\rc", "⌝"],
  ["\\ex", "∃"],
  ["\\all", "∀"],
  ["\\leq", "≤"],
  ["\\gamma", "γ"],
  ["\\lambda", "λ"],
  ["\\Phi", "Φ"],
  ["\\ell", "ℓ"],
  ["\\top", "⊤"],
];

/** Expand backslash names anywhere in the input line. */
export function expandInput(text: string): string {
  let out = text;
  for (const [name, sym] of BACKSLASH) {
    out = out.split(name).join(sym);
  }
  return out;
}
