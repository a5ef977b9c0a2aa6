/** Shapes exchanged with the mapping service (JSON bodies). */

export interface SchemaNode {
  db: string;
  type: "Model" | "TextField" | "NullBooleanField" | "DateTimeField" | "ForeignKey";
  repetitive: boolean;
  text: string;
  nodes?: SchemaNode[];
}

export function isEntity(node: SchemaNode): boolean {
  return node.type === "Model" || node.type === "ForeignKey";
}

/**
 * One node of the draft mapping as the service serializes it:
 * reserved keys hold the bindings, every other key is a child node.
 */
export type DraftNode = Record<string, unknown>;

export function draftXPaths(node: DraftNode | undefined): string[] {
  const raw = node?.["__xpath__"];
  return Array.isArray(raw) ? (raw as string[]) : [];
}

export function draftConversion(node: DraftNode | undefined): Record<string, string> {
  const raw = node?.["__conversion__"];
  return raw && typeof raw === "object" ? (raw as Record<string, string>) : {};
}

export function draftChild(node: DraftNode | undefined, name: string): DraftNode | undefined {
  const raw = node?.[name];
  return raw && typeof raw === "object" ? (raw as DraftNode) : undefined;
}

/** Locate the draft node for a dotted schema path like "document.attribute1". */
export function draftAt(draft: DraftNode, dottedPath: string): DraftNode | undefined {
  let node: DraftNode | undefined = draft;
  for (const part of dottedPath.split(".")) {
    node = draftChild(node, part);
    if (!node) return undefined;
  }
  return node;
}

export interface SessionState {
  version: number;
  schema: SchemaNode;
  samples: string[];
  draft: DraftNode;
}

export interface CoverageReport {
  version: number;
  mapped: string[];
  unmapped: string[];
  ratio: number;
  deadBindings: string[];
  sampledUnmapped: string[];
}

export interface PreviewInstance {
  entity: string;
  floatingId: number;
  attrs: Record<string, string>;
  parentRef: [string, number] | null;
}

export interface PreviewResult {
  version: number;
  counts: Record<string, number>;
  instances: PreviewInstance[];
}

export interface SynsetJson {
  id: string;
  canonical: string;
  variants: string[];
  parent?: string;
}

export interface DictionaryJson {
  language: string;
  version: number;
  synsets: SynsetJson[];
}
