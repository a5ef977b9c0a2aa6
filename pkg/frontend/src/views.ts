/**
 * DOM rendering: pure functions from UI state to elements.
 *
 * Interactive elements carry data-action attributes; app.ts dispatches
 * them to store methods by delegation, so views stay testable without
 * wiring.
 */

import type { UiState } from "./store.js";
import type { PreviewInstance, SchemaNode } from "./types.js";
import { draftAt, draftConversion, draftXPaths, isEntity } from "./types.js";

function h(
  tag: string,
  attrs: Record<string, string | boolean | undefined> = {},
  children: (Node | string)[] = [],
): HTMLElement {
  const element = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    if (value === undefined || value === false) continue;
    if (value === true) element.setAttribute(name, "");
    else element.setAttribute(name, value);
  }
  for (const child of children) {
    element.append(child);
  }
  return element;
}

// -- sample xpath tree ---------------------------------------------------------

interface SampleTreeNode {
  segment: string;
  full: string;
  value?: string;
  children: Map<string, SampleTreeNode>;
}

export function buildSampleTree(xpaths: Record<string, string>): SampleTreeNode {
  const root: SampleTreeNode = { segment: "", full: "", children: new Map() };
  for (const path of Object.keys(xpaths).sort()) {
    let node = root;
    for (const segment of path.slice(1).split("/")) {
      let child = node.children.get(segment);
      if (!child) {
        child = { segment, full: `${node.full}/${segment}`, children: new Map() };
        node.children.set(segment, child);
      }
      node = child;
    }
    node.value = xpaths[path];
  }
  return root;
}

function renderSampleNode(node: SampleTreeNode, selected: string | null): HTMLElement {
  const row = h(
    "span",
    {
      class: "xpath-node" + (node.full === selected ? " selected" : ""),
      "data-action": "select-xpath",
      "data-xpath": node.full,
      title: node.full,
    },
    [node.segment],
  );
  const item = h("li", {}, [row]);
  if (node.value !== undefined) {
    item.append(h("span", { class: "sample-value" }, [node.value]));
  }
  if (node.children.size) {
    const list = h("ul", {});
    for (const child of node.children.values()) {
      list.append(renderSampleNode(child, selected));
    }
    item.append(list);
  }
  return item;
}

export function renderSampleTree(state: UiState): HTMLElement {
  const pane = h("section", { class: "pane", id: "sample-pane" }, [
    h("h2", {}, ["Sample XML"]),
  ]);
  const tree = buildSampleTree(state.xpaths);
  if (!tree.children.size) {
    pane.append(h("p", { class: "hint" }, ["no samples loaded"]));
    return pane;
  }
  const list = h("ul", { class: "tree" });
  for (const child of tree.children.values()) {
    list.append(renderSampleNode(child, state.selectedXPath));
  }
  pane.append(list);
  return pane;
}

// -- schema tree with binding chips -----------------------------------------------

function typeBadge(node: SchemaNode): HTMLElement {
  return h("span", { class: "badge type-" + node.type }, [node.type]);
}

function renderChips(state: UiState, dotted: string): HTMLElement {
  const xpaths = draftXPaths(draftAt(state.draft, dotted));
  const chips = h("span", { class: "chips" });
  xpaths.forEach((xpath, index) => {
    const chip = h("span", { class: "chip", "data-xpath": xpath }, [xpath]);
    if (index > 0) {
      chip.append(
        h(
          "button",
          {
            class: "chip-up",
            "data-action": "move-up",
            "data-schema-path": dotted,
            "data-xpath": xpath,
            title: "try this xpath earlier (first match wins)",
          },
          ["↑"],
        ),
      );
    }
    chip.append(
      h(
        "button",
        {
          class: "chip-remove",
          "data-action": "unbind",
          "data-schema-path": dotted,
          "data-xpath": xpath,
          title: "unbind",
        },
        ["×"],
      ),
    );
    chips.append(chip);
  });
  return chips;
}

function renderSchemaNode(state: UiState, node: SchemaNode, dotted: string): HTMLElement {
  const selected = state.selectedSchemaPath === dotted;
  const row = h("div", { class: "schema-row" + (selected ? " selected" : "") }, [
    h(
      "span",
      {
        class: "schema-label",
        "data-action": "select-schema",
        "data-schema-path": dotted,
        title: dotted,
      },
      [node.text || node.db],
    ),
    typeBadge(node),
  ]);
  if (node.repetitive) {
    row.append(h("span", { class: "badge repetitive" }, ["repetitive"]));
  }
  row.append(
    h(
      "button",
      {
        class: "bind-button",
        "data-action": "bind-here",
        "data-schema-path": dotted,
        disabled: !state.selectedXPath || state.conflict,
        title: "bind the selected sample xpath to this node",
      },
      ["bind"],
    ),
  );
  row.append(renderChips(state, dotted));

  const item = h("li", {}, [row]);
  const conversion = draftConversion(draftAt(state.draft, dotted));
  const conversionEntries = Object.entries(conversion);
  if (!isEntity(node) && (selected || conversionEntries.length)) {
    const panel = h("div", { class: "conversion" });
    for (const [from, to] of conversionEntries) {
      panel.append(h("span", { class: "conversion-rule" }, [`${from} → ${to}`]));
    }
    if (selected) {
      panel.append(
        h("input", { class: "conv-from", placeholder: "found value", "data-role": "conv-from" }),
        h("input", { class: "conv-to", placeholder: "stored value", "data-role": "conv-to" }),
        h(
          "button",
          {
            "data-action": "set-conversion",
            "data-schema-path": dotted,
            disabled: state.conflict,
          },
          ["add conversion"],
        ),
      );
    }
    item.append(panel);
  }
  if (node.nodes?.length) {
    const list = h("ul", {});
    for (const child of node.nodes) {
      list.append(renderSchemaNode(state, child, `${dotted}.${child.db}`));
    }
    item.append(list);
  }
  return item;
}

export function renderSchemaTree(state: UiState): HTMLElement {
  const pane = h("section", { class: "pane", id: "schema-pane" }, [
    h("h2", {}, ["Target schema"]),
  ]);
  if (!state.schema) {
    pane.append(h("p", { class: "hint" }, ["no schema loaded"]));
    return pane;
  }
  const list = h("ul", { class: "tree" }, [
    renderSchemaNode(state, state.schema, state.schema.db),
  ]);
  pane.append(list);
  return pane;
}

// -- coverage ----------------------------------------------------------------------

export function renderCoveragePanel(state: UiState): HTMLElement {
  const pane = h("section", { class: "pane", id: "coverage-pane" }, [
    h("h2", {}, ["Coverage"]),
    h("button", { "data-action": "refresh-coverage" }, ["refresh"]),
  ]);
  const coverage = state.coverage;
  if (!coverage) {
    pane.append(h("p", { class: "hint" }, ["not computed yet"]));
    return pane;
  }
  const percent = Math.round(coverage.ratio * 100);
  pane.append(
    h("p", { class: "coverage-ratio", id: "coverage-ratio" }, [
      `${percent}% mapped (${coverage.mapped.length} of ` +
        `${coverage.mapped.length + coverage.unmapped.length} paths)`,
    ]),
  );
  if (coverage.sampledUnmapped.length) {
    const list = h("ul", { class: "unmapped-list" });
    for (const path of coverage.sampledUnmapped) {
      list.append(
        h("li", {}, [
          h(
            "span",
            { "data-action": "select-xpath", "data-xpath": path, class: "xpath-node" },
            [path],
          ),
          h(
            "button",
            { "data-action": "select-xpath", "data-xpath": path, class: "bind-from-here" },
            ["bind from here"],
          ),
        ]),
      );
    }
    pane.append(h("h3", {}, ["top unmapped paths"]), list);
  }
  if (coverage.deadBindings.length) {
    pane.append(
      h("p", { class: "dead-bindings" }, [
        "dead bindings: " + coverage.deadBindings.join(", "),
      ]),
    );
  }
  return pane;
}

// -- parse preview -------------------------------------------------------------------

function previewRow(instance: PreviewInstance): HTMLElement {
  const attrs = Object.entries(instance.attrs)
    .map(([name, value]) => `${name}=${value}`)
    .join(", ");
  const parent = instance.parentRef
    ? `${instance.parentRef[0]}#${instance.parentRef[1]}`
    : "";
  return h("tr", {}, [
    h("td", {}, [instance.entity]),
    h("td", {}, [String(instance.floatingId)]),
    h("td", {}, [attrs]),
    h("td", {}, [parent]),
  ]);
}

export function renderPreviewPanel(state: UiState): HTMLElement {
  const pane = h("section", { class: "pane", id: "preview-pane" }, [
    h("h2", {}, ["Parse preview"]),
    h("button", { "data-action": "run-preview", disabled: !state.samples.length }, [
      "preview first sample",
    ]),
  ]);
  if (!state.preview) return pane;
  const table = h("table", { class: "preview-table" }, [
    h("tr", {}, [
      h("th", {}, ["entity"]),
      h("th", {}, ["id"]),
      h("th", {}, ["attributes"]),
      h("th", {}, ["parent"]),
    ]),
  ]);
  for (const instance of state.preview.instances) {
    table.append(previewRow(instance));
  }
  pane.append(table);
  return pane;
}

// -- dictionary curation ----------------------------------------------------------------

export function renderDictionaryPanel(state: UiState): HTMLElement {
  const pane = h("section", { class: "pane", id: "dictionary-pane" }, [
    h("h2", {}, ["Dictionary"]),
    h("input", { "data-role": "dict-lang", placeholder: "language (e.g. en)" }),
    h("button", { "data-action": "load-dictionary" }, ["load"]),
  ]);
  const dictionary = state.dictionary;
  if (!dictionary) return pane;
  pane.append(
    h("p", { class: "hint" }, [
      `${dictionary.language}, version ${dictionary.version}, ` +
        `${dictionary.synsets.length} synsets`,
    ]),
  );
  const table = h("table", { class: "synset-table" }, [
    h("tr", {}, [
      h("th", {}, ["id"]),
      h("th", {}, ["canonical"]),
      h("th", {}, ["variants"]),
      h("th", {}, ["parent"]),
      h("th", {}, [""]),
    ]),
  ]);
  for (const synset of dictionary.synsets) {
    table.append(
      h("tr", { "data-synset": synset.id }, [
        h("td", {}, [synset.id]),
        h("td", {}, [synset.canonical]),
        h("td", {}, [synset.variants.join(" | ")]),
        h("td", {}, [synset.parent ?? ""]),
        h("td", {}, [
          h(
            "button",
            { "data-action": "reject-synset", "data-synset": synset.id, title: "reject" },
            ["reject"],
          ),
        ]),
      ]),
    );
  }
  pane.append(table);
  pane.append(
    h("div", { class: "dict-actions" }, [
      h("input", { "data-role": "merge-dst", placeholder: "keep id" }),
      h("input", { "data-role": "merge-src", placeholder: "absorb id" }),
      h("button", { "data-action": "merge-synsets" }, ["merge"]),
      h("input", { "data-role": "parent-child", placeholder: "synset id" }),
      h("input", { "data-role": "parent-id", placeholder: "parent id (empty clears)" }),
      h("button", { "data-action": "set-parent" }, ["set parent"]),
      h("input", { "data-role": "split-source", placeholder: "split from id" }),
      h("input", { "data-role": "split-variants", placeholder: "variants, comma-separated" }),
      h("button", { "data-action": "split-synset" }, ["split"]),
    ]),
  );
  return pane;
}

// -- top-level ---------------------------------------------------------------------------

function renderSetupForm(): HTMLElement {
  return h("section", { class: "pane", id: "setup-pane" }, [
    h("h2", {}, ["Open a mapping session"]),
    h("textarea", { "data-role": "schema-json", placeholder: "schema JSON", rows: "8" }),
    h("textarea", { "data-role": "sample-xml", placeholder: "sample XML", rows: "8" }),
    h("button", { "data-action": "open-session" }, ["open session"]),
  ]);
}

export function renderApp(state: UiState): HTMLElement {
  const root = h("div", { id: "app-root" });
  if (state.conflict) {
    root.append(
      h("div", { class: "banner conflict", id: "conflict-banner" }, [
        "The draft changed on the server (another tab?). ",
        h("button", { "data-action": "reload-session" }, ["reload latest draft"]),
      ]),
    );
  } else if (state.error) {
    root.append(h("div", { class: "banner error", id: "error-banner" }, [state.error]));
  }
  if (!state.sessionId) {
    root.append(renderSetupForm());
    return root;
  }
  root.append(
    h("div", { class: "toolbar" }, [
      h("span", { class: "session-id" }, [`session ${state.sessionId}`]),
      h("span", { class: "draft-version", id: "draft-version" }, [
        `draft v${state.version}`,
      ]),
      h("button", { "data-action": "export-mapping" }, ["export mapping"]),
    ]),
    h("div", { class: "panes" }, [
      renderSchemaTree(state),
      renderSampleTree(state),
      renderCoveragePanel(state),
      renderPreviewPanel(state),
      renderDictionaryPanel(state),
    ]),
  );
  return root;
}
