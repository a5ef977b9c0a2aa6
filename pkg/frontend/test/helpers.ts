import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { MappingStore } from "../src/store.js";

export const BASE_URL = "http://127.0.0.1:8695";

const fixturesDir = join(
  dirname(fileURLToPath(import.meta.url)),
  "..",
  "..",
  "tests",
  "fixtures",
);

export function fixture(name: string): string {
  return readFileSync(join(fixturesDir, name), "utf-8");
}

export async function waitFor(
  predicate: () => boolean,
  what = "condition",
  timeoutMs = 5000,
): Promise<void> {
  const started = Date.now();
  while (!predicate()) {
    if (Date.now() - started > timeoutMs) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 20));
  }
}

/** Click a rendered control and wait until the store confirms the write. */
export async function clickAndSettle(
  container: HTMLElement,
  store: MappingStore,
  selector: string,
): Promise<void> {
  const before = store.getState().version;
  const element = container.querySelector<HTMLElement>(selector);
  if (!element) throw new Error(`no element matches ${selector}`);
  element.click();
  await waitFor(
    () => store.getState().version !== before || store.getState().error !== null,
    `version change after clicking ${selector}`,
  );
  const { error } = store.getState();
  if (error) throw new Error(`action ${selector} failed: ${error}`);
}

export function clickXPathNode(container: HTMLElement, xpath: string): void {
  const selector = `[data-action="select-xpath"][data-xpath="${xpath}"]`;
  const element = container.querySelector<HTMLElement>(selector);
  if (!element) throw new Error(`xpath node ${xpath} not rendered`);
  element.click();
}

export async function bindByClick(
  container: HTMLElement,
  store: MappingStore,
  xpath: string,
  schemaPath: string,
): Promise<void> {
  clickXPathNode(container, xpath);
  await clickAndSettle(
    container,
    store,
    `[data-action="bind-here"][data-schema-path="${schemaPath}"]`,
  );
}
