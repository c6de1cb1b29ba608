/**
 * Deterministic DAG layout by longest-path layering: a node's layer is
 * the length of the longest parent chain above it, nodes within a layer
 * keep declaration order, and each layer is centered. The same document
 * always produces the same pixel positions.
 */

import type { NetworkDocument } from "./api.js";

export interface LayoutOptions {
  nodeWidth: number;
  nodeHeight: number;
  gapX: number;
  gapY: number;
}

export interface PlacedNode {
  name: string;
  layer: number;
  x: number;
  y: number;
}

export interface PlacedEdge {
  from: string;
  to: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface DagLayout {
  nodes: PlacedNode[];
  edges: PlacedEdge[];
  width: number;
  height: number;
}

export const DEFAULT_LAYOUT: LayoutOptions = {
  nodeWidth: 150,
  nodeHeight: 54,
  gapX: 36,
  gapY: 64,
};

export function layerAssignment(doc: NetworkDocument): Map<string, number> {
  const layers = new Map<string, number>();
  const resolve = (name: string): number => {
    const known = layers.get(name);
    if (known !== undefined) {
      return known;
    }
    const variable = doc.variables.find((v) => v.name === name);
    if (!variable) {
      throw new Error(`document references missing variable ${name}`);
    }
    const layer = variable.parents.length === 0
      ? 0
      : 1 + Math.max(...variable.parents.map(resolve));
    layers.set(name, layer);
    return layer;
  };
  for (const variable of doc.variables) {
    resolve(variable.name);
  }
  return layers;
}

export function layoutNetwork(
  doc: NetworkDocument,
  options: LayoutOptions = DEFAULT_LAYOUT,
): DagLayout {
  const { nodeWidth, nodeHeight, gapX, gapY } = options;
  const layers = layerAssignment(doc);
  const byLayer: string[][] = [];
  for (const variable of doc.variables) {
    const layer = layers.get(variable.name)!;
    (byLayer[layer] ??= []).push(variable.name);
  }
  const widest = Math.max(...byLayer.map((row) => row.length));
  const width = widest * (nodeWidth + gapX) - gapX;
  const positions = new Map<string, { x: number; y: number }>();
  const nodes: PlacedNode[] = [];
  byLayer.forEach((row, layer) => {
    const rowWidth = row.length * (nodeWidth + gapX) - gapX;
    const offset = (width - rowWidth) / 2;
    row.forEach((name, index) => {
      const x = offset + index * (nodeWidth + gapX);
      const y = layer * (nodeHeight + gapY);
      positions.set(name, { x, y });
      nodes.push({ name, layer, x, y });
    });
  });
  const edges: PlacedEdge[] = [];
  for (const variable of doc.variables) {
    for (const parent of variable.parents) {
      const from = positions.get(parent)!;
      const to = positions.get(variable.name)!;
      edges.push({
        from: parent,
        to: variable.name,
        x1: from.x + nodeWidth / 2,
        y1: from.y + nodeHeight,
        x2: to.x + nodeWidth / 2,
        y2: to.y,
      });
    }
  }
  return {
    nodes,
    edges,
    width,
    height: byLayer.length * (nodeHeight + gapY) - gapY,
  };
}
