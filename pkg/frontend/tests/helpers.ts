/** Fixture loading for the contract tests.
 *
 * The JSON files under tests/fixtures/ are recorded from a live platform
 * by scripts/record_fixtures.py; each holds {status, body}.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

export interface Recorded<T> {
  status: number;
  body: T;
}

export function loadFixture<T>(name: string): Recorded<T> {
  const raw = readFileSync(join(here, "fixtures", `${name}.json`), "utf-8");
  return JSON.parse(raw) as Recorded<T>;
}
