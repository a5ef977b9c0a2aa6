/**
 * UI state machine over the service client.
 *
 * Every mutation goes through the service and the store only keeps what
 * the server confirmed, so the rendered draft is always a committed
 * server state at a known version. A 409 from a stale write flips the
 * store into conflict mode; the only way out is syncFromServer(), which
 * is exactly the reload prompt the UI shows.
 */

import { ApiError, ServiceClient } from "./api.js";
import type {
  CoverageReport,
  DictionaryJson,
  DraftNode,
  PreviewResult,
  SchemaNode,
} from "./types.js";

export interface UiState {
  sessionId: string | null;
  version: number;
  schema: SchemaNode | null;
  draft: DraftNode;
  xpaths: Record<string, string>; // enumerated sample paths -> sample value
  samples: string[];
  selectedXPath: string | null;
  selectedSchemaPath: string | null;
  coverage: CoverageReport | null;
  preview: PreviewResult | null;
  dictionary: DictionaryJson | null;
  error: string | null;
  conflict: boolean;
  busy: boolean;
}

function initialState(): UiState {
  return {
    sessionId: null,
    version: 0,
    schema: null,
    draft: {},
    xpaths: {},
    samples: [],
    selectedXPath: null,
    selectedSchemaPath: null,
    coverage: null,
    preview: null,
    dictionary: null,
    error: null,
    conflict: false,
    busy: false,
  };
}

type Listener = (state: UiState) => void;

export class MappingStore {
  private state = initialState();
  private listeners = new Set<Listener>();

  constructor(readonly api: ServiceClient) {}

  getState(): UiState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private update(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  private async write<T extends { version: number; draft: Record<string, unknown> }>(
    operation: () => Promise<T>,
  ): Promise<boolean> {
    try {
      const result = await operation();
      this.update({ version: result.version, draft: result.draft, error: null });
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        this.update({ conflict: true, error: error.message });
      } else {
        this.update({ error: error instanceof Error ? error.message : String(error) });
      }
      return false;
    }
  }

  // -- session lifecycle ---------------------------------------------------

  async openSession(schemaJson: string, sampleXml: string[]): Promise<boolean> {
    this.update({ busy: true, error: null });
    try {
      const schema = JSON.parse(schemaJson) as SchemaNode;
      const created = await this.api.createSession(schema);
      const samples = sampleXml.length
        ? await this.api.addSamples(created.sessionId, { xml: sampleXml })
        : { version: created.version, xpaths: {}, samples: [] };
      const session = await this.api.sessionState(created.sessionId);
      this.update({
        sessionId: created.sessionId,
        version: session.version,
        schema: session.schema,
        draft: session.draft,
        xpaths: samples.xpaths,
        samples: samples.samples,
        selectedXPath: null,
        selectedSchemaPath: null,
        coverage: null,
        preview: null,
        conflict: false,
        busy: false,
      });
      return true;
    } catch (error) {
      this.update({
        busy: false,
        error: error instanceof Error ? error.message : String(error),
      });
      return false;
    }
  }

  /** Reload the committed server state; clears a conflict. */
  async syncFromServer(): Promise<void> {
    if (!this.state.sessionId) return;
    const session = await this.api.sessionState(this.state.sessionId);
    this.update({
      version: session.version,
      schema: session.schema,
      draft: session.draft,
      samples: session.samples,
      conflict: false,
      error: null,
    });
  }

  // -- selection and binding --------------------------------------------------

  selectXPath(path: string | null): void {
    this.update({ selectedXPath: path });
  }

  selectSchemaPath(path: string | null): void {
    this.update({ selectedSchemaPath: path });
  }

  /** The click-to-bind flow: selected sample path onto a schema node. */
  async bindSelected(schemaPath: string): Promise<boolean> {
    const xpath = this.state.selectedXPath;
    if (!xpath || !this.state.sessionId) return false;
    return this.bind(schemaPath, xpath);
  }

  async bind(schemaPath: string, xpath: string): Promise<boolean> {
    const { sessionId, version } = this.state;
    if (!sessionId) return false;
    return this.write(() => this.api.bind(sessionId, schemaPath, xpath, version));
  }

  async unbind(schemaPath: string, xpath: string): Promise<boolean> {
    const { sessionId, version } = this.state;
    if (!sessionId) return false;
    return this.write(() => this.api.unbind(sessionId, schemaPath, xpath, version));
  }

  /**
   * First-match order is significant, so reordering rebinds the whole
   * list: unbind everything, rebind in the new order.
   */
  async reorder(schemaPath: string, xpaths: string[]): Promise<boolean> {
    for (const xpath of xpaths) {
      if (!(await this.unbind(schemaPath, xpath))) return false;
    }
    for (const xpath of xpaths) {
      if (!(await this.bind(schemaPath, xpath))) return false;
    }
    return true;
  }

  async moveXPathUp(schemaPath: string, xpath: string, current: string[]): Promise<boolean> {
    const index = current.indexOf(xpath);
    if (index <= 0) return true;
    const next = [...current];
    next.splice(index, 1);
    next.splice(index - 1, 0, xpath);
    return this.reorder(schemaPath, next);
  }

  async setConversion(schemaPath: string, from: string, to: string): Promise<boolean> {
    const { sessionId, version } = this.state;
    if (!sessionId) return false;
    return this.write(() => this.api.setConversion(sessionId, schemaPath, from, to, version));
  }

  // -- inspection -------------------------------------------------------------

  async exportMapping(): Promise<string | null> {
    if (!this.state.sessionId) return null;
    return this.api.exportMapping(this.state.sessionId);
  }

  async refreshCoverage(k = 10): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      const coverage = await this.api.coverage(this.state.sessionId, k);
      this.update({ coverage, error: null });
    } catch (error) {
      this.update({ error: error instanceof Error ? error.message : String(error) });
    }
  }

  async runPreview(sample?: string): Promise<void> {
    const { sessionId, samples } = this.state;
    if (!sessionId) return;
    const target = sample ?? samples[0];
    if (!target) {
      this.update({ error: "no sample loaded to preview" });
      return;
    }
    try {
      const preview = await this.api.parsePreview(sessionId, { sample: target });
      this.update({ preview, error: null });
    } catch (error) {
      this.update({ error: error instanceof Error ? error.message : String(error) });
    }
  }

  // -- dictionary curation -------------------------------------------------------

  private async dictionaryWrite(
    operation: () => Promise<DictionaryJson>,
  ): Promise<boolean> {
    try {
      const dictionary = await operation();
      this.update({ dictionary, error: null });
      return true;
    } catch (error) {
      this.update({ error: error instanceof Error ? error.message : String(error) });
      return false;
    }
  }

  async loadDictionary(lang: string, createIfMissing = false): Promise<boolean> {
    try {
      const dictionary = await this.api.readDictionary(lang);
      this.update({ dictionary, error: null });
      return true;
    } catch (error) {
      if (createIfMissing && error instanceof ApiError && error.status === 404) {
        return this.dictionaryWrite(() => this.api.createDictionary(lang));
      }
      this.update({ error: error instanceof Error ? error.message : String(error) });
      return false;
    }
  }

  async addVariant(synsetId: string, variant: string): Promise<boolean> {
    const lang = this.state.dictionary?.language;
    if (!lang) return false;
    return this.dictionaryWrite(() => this.api.addVariant(lang, synsetId, variant));
  }

  async mergeSynsets(dst: string, src: string): Promise<boolean> {
    const lang = this.state.dictionary?.language;
    if (!lang) return false;
    return this.dictionaryWrite(() => this.api.mergeSynsets(lang, dst, src));
  }

  async splitSynset(source: string, variants: string[]): Promise<boolean> {
    const lang = this.state.dictionary?.language;
    if (!lang) return false;
    return this.dictionaryWrite(() => this.api.splitSynset(lang, source, variants));
  }

  async setSynsetParent(id: string, parent: string | null): Promise<boolean> {
    const lang = this.state.dictionary?.language;
    if (!lang) return false;
    return this.dictionaryWrite(() => this.api.setParent(lang, id, parent));
  }

  /** Rejecting a proposed key drops its synset from the dictionary. */
  async removeSynset(id: string): Promise<boolean> {
    const lang = this.state.dictionary?.language;
    if (!lang) return false;
    return this.dictionaryWrite(() => this.api.removeSynset(lang, id));
  }
}
