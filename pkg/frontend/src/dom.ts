/** Materialize a view description with the real document API. */

import type { VNode } from "./view.js";

export function materialize(node: VNode | string): Node {
  if (typeof node === "string") {
    return document.createTextNode(node);
  }
  const el = document.createElement(node.tag);
  for (const [k, v] of Object.entries(node.attrs ?? {})) {
    el.setAttribute(k, v);
  }
  for (const child of node.children ?? []) {
    el.appendChild(materialize(child));
  }
  return el;
}

export function replaceChildrenWith(target: Element, node: VNode): void {
  target.replaceChildren(materialize(node));
}
