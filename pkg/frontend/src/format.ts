// Display-only formatting of server-provided numbers.

export function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function pct(x: number, digits = 1): string {
  return (x * 100).toFixed(digits) + "%";
}

export function num(x: number, digits = 3): string {
  return x.toFixed(digits);
}

export function signed(x: number, digits = 4): string {
  const text = Math.abs(x).toFixed(digits);
  return (x < 0 ? "-" : "+") + text;
}

export function signedPct(x: number, digits = 2): string {
  const text = Math.abs(x * 100).toFixed(digits);
  return (x < 0 ? "-" : "+") + text + "%";
}

/** Threshold shown as entered by the server; trims float noise only. */
export function threshold(x: number): string {
  const rounded = Math.round(x * 1000) / 1000;
  return String(rounded);
}
