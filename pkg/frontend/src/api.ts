/** Thin typed client over the mapping service's JSON endpoints. */

import type {
  CoverageReport,
  DictionaryJson,
  PreviewResult,
  SessionState,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

async function parseError(response: Response): Promise<never> {
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = (await response.json()) as { error?: string };
    if (body.error) message = body.error;
  } catch {
    /* non-JSON error body: keep the status line */
  }
  throw new ApiError(response.status, message);
}

export class ServiceClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  createSession(schema: unknown): Promise<{ sessionId: string; version: number }> {
    return this.request("POST", "/sessions", { schema });
  }

  sessionState(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  addSamples(
    sessionId: string,
    body: { xml?: string | string[]; recordIds?: string[] },
  ): Promise<{ version: number; xpaths: Record<string, string>; samples: string[] }> {
    return this.request("POST", `/sessions/${sessionId}/samples`, body);
  }

  bind(sessionId: string, schemaPath: string, xpath: string, version: number) {
    return this.request<{ version: number; draft: Record<string, unknown> }>(
      "POST",
      `/sessions/${sessionId}/bind`,
      { schemaPath, xpath, version },
    );
  }

  unbind(sessionId: string, schemaPath: string, xpath: string, version: number) {
    return this.request<{ version: number; draft: Record<string, unknown> }>(
      "DELETE",
      `/sessions/${sessionId}/bind`,
      { schemaPath, xpath, version },
    );
  }

  setConversion(
    sessionId: string,
    schemaPath: string,
    from: string,
    to: string,
    version: number,
  ) {
    return this.request<{ version: number; draft: Record<string, unknown> }>(
      "POST",
      `/sessions/${sessionId}/conversion`,
      { schemaPath, from, to, version },
    );
  }

  /** Raw export bytes as text; the UI must not reshape this payload. */
  async exportMapping(sessionId: string): Promise<string> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/mapping`);
    if (!response.ok) await parseError(response);
    return response.text();
  }

  parsePreview(
    sessionId: string,
    body: { sample?: string; recordId?: string; xml?: string },
  ): Promise<PreviewResult> {
    return this.request("POST", `/sessions/${sessionId}/parse-preview`, body);
  }

  coverage(sessionId: string, k = 10): Promise<CoverageReport> {
    return this.request("GET", `/validation/coverage?session=${sessionId}&k=${k}`);
  }

  listDictionaries(): Promise<{ languages: string[] }> {
    return this.request("GET", "/dictionaries");
  }

  readDictionary(lang: string): Promise<DictionaryJson> {
    return this.request("GET", `/dictionaries/${lang}`);
  }

  createDictionary(lang: string): Promise<DictionaryJson> {
    return this.request("POST", `/dictionaries/${lang}`, {});
  }

  addSynset(lang: string, synset: { id?: string; canonical: string; variants: string[] }) {
    return this.request<DictionaryJson>("POST", `/dictionaries/${lang}/synsets`, synset);
  }

  addVariant(lang: string, synsetId: string, variant: string) {
    return this.request<DictionaryJson>(
      "POST",
      `/dictionaries/${lang}/synsets/${synsetId}/variants`,
      { variant },
    );
  }

  mergeSynsets(lang: string, dst: string, src: string) {
    return this.request<DictionaryJson>("POST", `/dictionaries/${lang}/merge`, { dst, src });
  }

  splitSynset(lang: string, source: string, variants: string[]) {
    return this.request<DictionaryJson & { newId: string }>(
      "POST",
      `/dictionaries/${lang}/split`,
      { source, variants },
    );
  }

  setParent(lang: string, id: string, parent: string | null) {
    return this.request<DictionaryJson>("POST", `/dictionaries/${lang}/parent`, { id, parent });
  }

  removeSynset(lang: string, synsetId: string) {
    return this.request<DictionaryJson>("DELETE", `/dictionaries/${lang}/synsets/${synsetId}`);
  }
}
