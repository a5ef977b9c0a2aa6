/** Wire the store to the DOM: render on change, dispatch clicks to actions. */

import { ServiceClient } from "./api.js";
import { MappingStore } from "./store.js";
import { renderApp } from "./views.js";

function inputValue(container: HTMLElement, role: string): string {
  const element = container.querySelector<HTMLInputElement | HTMLTextAreaElement>(
    `[data-role="${role}"]`,
  );
  return element ? element.value.trim() : "";
}

export function mountApp(container: HTMLElement, store: MappingStore): void {
  const render = () => {
    container.replaceChildren(renderApp(store.getState()));
  };
  store.subscribe(render);
  render();

  container.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!target || target.hasAttribute("disabled")) return;
    const action = target.dataset["action"];
    const xpath = target.dataset["xpath"] ?? "";
    const schemaPath = target.dataset["schemaPath"] ?? "";
    void dispatch(action, { xpath, schemaPath, target });
  });

  async function dispatch(
    action: string | undefined,
    context: { xpath: string; schemaPath: string; target: HTMLElement },
  ): Promise<void> {
    const state = store.getState();
    switch (action) {
      case "open-session": {
        const schemaJson = inputValue(container, "schema-json");
        const sampleXml = inputValue(container, "sample-xml");
        await store.openSession(schemaJson, sampleXml ? [sampleXml] : []);
        break;
      }
      case "reload-session":
        await store.syncFromServer();
        break;
      case "select-xpath":
        store.selectXPath(context.xpath);
        break;
      case "select-schema":
        store.selectSchemaPath(
          state.selectedSchemaPath === context.schemaPath ? null : context.schemaPath,
        );
        break;
      case "bind-here":
        await store.bindSelected(context.schemaPath);
        break;
      case "unbind":
        await store.unbind(context.schemaPath, context.xpath);
        break;
      case "move-up": {
        const node = state.draft;
        const xpaths = currentXPaths(node, context.schemaPath);
        await store.moveXPathUp(context.schemaPath, context.xpath, xpaths);
        break;
      }
      case "set-conversion": {
        const from = inputValue(container, "conv-from");
        const to = inputValue(container, "conv-to");
        if (from) await store.setConversion(context.schemaPath, from, to);
        break;
      }
      case "refresh-coverage":
        await store.refreshCoverage();
        break;
      case "run-preview":
        await store.runPreview();
        break;
      case "export-mapping": {
        const exported = await store.exportMapping();
        if (exported !== null) downloadMapping(exported);
        break;
      }
      case "load-dictionary": {
        const lang = inputValue(container, "dict-lang");
        if (lang) await store.loadDictionary(lang, true);
        break;
      }
      case "reject-synset":
        await store.removeSynset(context.target.dataset["synset"] ?? "");
        break;
      case "merge-synsets": {
        const dst = inputValue(container, "merge-dst");
        const src = inputValue(container, "merge-src");
        if (dst && src) await store.mergeSynsets(dst, src);
        break;
      }
      case "set-parent": {
        const child = inputValue(container, "parent-child");
        const parent = inputValue(container, "parent-id");
        if (child) await store.setSynsetParent(child, parent || null);
        break;
      }
      case "split-synset": {
        const source = inputValue(container, "split-source");
        const variants = inputValue(container, "split-variants")
          .split(",")
          .map((v) => v.trim())
          .filter(Boolean);
        if (source && variants.length) await store.splitSynset(source, variants);
        break;
      }
      default:
        break;
    }
  }
}

function currentXPaths(draft: Record<string, unknown>, dotted: string): string[] {
  let node: Record<string, unknown> | undefined = draft;
  for (const part of dotted.split(".")) {
    node = node?.[part] as Record<string, unknown> | undefined;
  }
  const raw = node?.["__xpath__"];
  return Array.isArray(raw) ? (raw as string[]) : [];
}

function downloadMapping(content: string): void {
  const blob = new Blob([content], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = "mapping.json";
  anchor.click();
  URL.revokeObjectURL(url);
}

export function bootstrap(): void {
  const container = document.getElementById("app");
  if (!container) throw new Error("missing #app container");
  const store = new MappingStore(new ServiceClient(""));
  mountApp(container, store);
}

declare global {
  interface Window {
    weftBootstrapped?: boolean;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  if (!window.weftBootstrapped) {
    window.weftBootstrapped = true;
    bootstrap();
  }
}
