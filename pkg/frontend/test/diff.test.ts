import { describe, expect, it } from "vitest";

import { classifyLine, escapeHtml, renderDiffHtml } from "../src/diff.js";

describe("classifyLine", () => {
  it("distinguishes every marker", () => {
    expect(classifyLine("=== main.cpp")).toBe("header");
    expect(classifyLine("+ int logic() {")).toBe("added");
    expect(classifyLine("- cout << x;")).toBe("deleted");
    expect(classifyLine("~     int sum = 0;")).toBe("relocated");
    expect(classifyLine("  return 0;")).toBe("context");
    expect(classifyLine("  (binary file changed)")).toBe("binary");
  });

  it("keeps relocated distinct from added and deleted", () => {
    const kinds = new Set([
      classifyLine("+ a"),
      classifyLine("- a"),
      classifyLine("~ a"),
    ]);
    expect(kinds.size).toBe(3);
  });
});

describe("renderDiffHtml", () => {
  it("wraps each line in a class-tagged row", () => {
    const html = renderDiffHtml("=== f.py\n+ x = 1\n~ y = 2\n- z = 3");
    expect(html).toContain('class="diff-line diff-header"');
    expect(html).toContain('class="diff-line diff-added"');
    expect(html).toContain('class="diff-line diff-relocated"');
    expect(html).toContain('class="diff-line diff-deleted"');
  });

  it("escapes markup in diff content", () => {
    const html = renderDiffHtml('+ <script>alert("x")</script>');
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });

  it("renders the empty diff placeholder", () => {
    expect(renderDiffHtml("")).toContain("(no changes)");
  });
});

describe("escapeHtml", () => {
  it("escapes the four risky characters", () => {
    expect(escapeHtml('<a href="x">&</a>')).toBe(
      "&lt;a href=&quot;x&quot;&gt;&amp;&lt;/a&gt;",
    );
  });
});
