import assert from "node:assert/strict";
import { test } from "node:test";

import { MissingColumnError, numericColumn, parseCsv } from "../src/csv";

test("parses header and numeric cells", () => {
  const t = parseCsv("t,mean_gap\n0,10\n20,0.5\n", "x.csv");
  assert.deepEqual(t.columns, ["t", "mean_gap"]);
  assert.equal(t.rowCount, 2);
  assert.deepEqual(numericColumn(t, "t"), [0, 20]);
  assert.deepEqual(numericColumn(t, "mean_gap"), [10, 0.5]);
});

test("keeps non-numeric cells as strings", () => {
  const t = parseCsv("strategy,R\nevery_step,10\n", "s.csv");
  assert.deepEqual(t.data.get("strategy"), ["every_step"]);
  assert.deepEqual(numericColumn(t, "R"), [10]);
});

test("missing column error names file and column", () => {
  const t = parseCsv("a,b\n1,2\n", "trace.csv");
  assert.throws(
    () => numericColumn(t, "mean_gap"),
    (err: unknown) => {
      assert.ok(err instanceof MissingColumnError);
      assert.equal(err.file, "trace.csv");
      assert.equal(err.column, "mean_gap");
      assert.match(err.message, /mean_gap/);
      assert.match(err.message, /trace\.csv/);
      return true;
    }
  );
});

test("non-numeric lookup of a string column fails with row context", () => {
  const t = parseCsv("strategy,R\nevery_step,10\n", "s.csv");
  assert.throws(() => numericColumn(t, "strategy"), /row 2/);
});

test("ragged rows rejected", () => {
  assert.throws(() => parseCsv("a,b\n1\n", "r.csv"), /line 2/);
});
