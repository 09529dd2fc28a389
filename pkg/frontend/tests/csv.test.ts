import { describe, expect, it } from "vitest";

import { checkCoreCsv } from "../src/csv.js";

const GOOD = [
  "label,text",
  "1,The film was wonderful .",
  "0,The plot was boring .",
].join("\n");

describe("checkCoreCsv", () => {
  it("accepts a well-formed two-class CSV", () => {
    const res = checkCoreCsv(GOOD);
    expect(res.ok).toBe(true);
    expect(res.rows).toHaveLength(2);
    expect(res.classCounts).toEqual({ positive: 1, negative: 1 });
  });

  it("rejects a wrong header with a line-1 message", () => {
    const res = checkCoreCsv("text,label\nx,1");
    expect(res.ok).toBe(false);
    expect(res.errors[0]).toMatch(/line 1/);
  });

  it("names the line of a bad label", () => {
    const res = checkCoreCsv("label,text\n1,fine\n2,confused\n0,bad");
    expect(res.ok).toBe(false);
    expect(res.errors.some((e) => e.includes("line 3"))).toBe(true);
  });

  it("flags single-class core sets", () => {
    const res = checkCoreCsv("label,text\n1,a fine film\n1,a lovely film");
    expect(res.ok).toBe(false);
    expect(res.errors.some((e) => e.includes("positive and one negative"))).toBe(true);
  });

  it("flags empty input and empty sentences", () => {
    expect(checkCoreCsv("").errors[0]).toMatch(/empty/);
    const res = checkCoreCsv("label,text\n1,");
    expect(res.errors.some((e) => e.includes("empty sentence"))).toBe(true);
  });

  it("keeps commas inside the sentence text", () => {
    const res = checkCoreCsv("label,text\n1,long, slow, but fine\n0,bad");
    expect(res.rows[0]?.text).toBe("long, slow, but fine");
  });
});
