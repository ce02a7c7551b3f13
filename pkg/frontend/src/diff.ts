// Rendering of annotated diff text.  Lines arrive prefixed with the
// marker convention ("+ " added, "- " deleted, "~ " relocated, two
// spaces for context, "=== " file headers); relocated lines get their
// own colour so a move never reads as an add/delete pair.

export type LineKind =
  | "header"
  | "added"
  | "deleted"
  | "relocated"
  | "context"
  | "binary";

export function classifyLine(line: string): LineKind {
  if (line.startsWith("=== ")) return "header";
  if (line.startsWith("+ ")) return "added";
  if (line.startsWith("- ")) return "deleted";
  if (line.startsWith("~ ")) return "relocated";
  if (line.startsWith("  (binary file changed)")) return "binary";
  return "context";
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderDiffHtml(diffText: string): string {
  if (diffText.trim() === "") {
    return '<div class="diff-empty">(no changes)</div>';
  }
  const rows = diffText
    .split("\n")
    .map((line) => {
      const kind = classifyLine(line);
      return `<div class="diff-line diff-${kind}">${escapeHtml(line) || "&nbsp;"}</div>`;
    })
    .join("");
  return `<div class="diff">${rows}</div>`;
}
