/** Non-blocking notification banners; errors never block the workbench. */

export type BannerKind = 'error' | 'info';

export class BannerHost {
  readonly el: HTMLElement;

  constructor(parent: HTMLElement, private readonly timeoutMs = 6000) {
    this.el = document.createElement('div');
    this.el.className = 'banners';
    parent.appendChild(this.el);
  }

  show(message: string, kind: BannerKind = 'error'): void {
    const banner = document.createElement('div');
    banner.className = `banner banner-${kind}`;
    const text = document.createElement('span');
    text.textContent = message;
    const dismiss = document.createElement('button');
    dismiss.textContent = '×';
    dismiss.className = 'banner-dismiss';
    dismiss.addEventListener('click', () => banner.remove());
    banner.append(text, dismiss);
    this.el.appendChild(banner);
    if (this.timeoutMs > 0) {
      setTimeout(() => banner.remove(), this.timeoutMs);
    }
  }

  messages(): string[] {
    return Array.from(this.el.querySelectorAll('.banner span')).map(
      (node) => node.textContent ?? '',
    );
  }
}
