/** Small DOM construction helpers; no framework, no templates. */

type Child = Node | string;

interface Attrs {
  className?: string;
  text?: string;
  title?: string;
  href?: string;
  type?: string;
  value?: string;
  checked?: boolean;
  disabled?: boolean;
  download?: string;
  onClick?: (event: Event) => void;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (attrs.className) node.className = attrs.className;
  if (attrs.text !== undefined) node.textContent = attrs.text;
  if (attrs.title) node.title = attrs.title;
  if (attrs.href !== undefined) (node as unknown as HTMLAnchorElement).href = attrs.href;
  if (attrs.type) (node as unknown as HTMLInputElement).type = attrs.type;
  if (attrs.value !== undefined) (node as unknown as HTMLInputElement).value = attrs.value;
  if (attrs.checked !== undefined) (node as unknown as HTMLInputElement).checked = attrs.checked;
  if (attrs.disabled !== undefined) (node as unknown as HTMLButtonElement).disabled = attrs.disabled;
  if (attrs.download !== undefined) (node as unknown as HTMLAnchorElement).download = attrs.download;
  if (attrs.onClick) node.addEventListener("click", attrs.onClick);
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: Element): void {
  node.textContent = "";
}
