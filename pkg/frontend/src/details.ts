/**
 * Detail panel: shows all bibliographic details of one cited reference,
 * exactly as served by GET /api/crs/{id}.
 */

import type { DetailPayload } from './api.js';

export class DetailPanel {
  readonly el: HTMLElement;
  lastPayload: DetailPayload | null = null;

  constructor(parent: HTMLElement) {
    this.el = document.createElement('aside');
    this.el.className = 'detail-panel';
    this.el.hidden = true;
    parent.appendChild(this.el);
  }

  show(payload: DetailPayload): void {
    this.lastPayload = payload;
    this.el.replaceChildren();

    const head = document.createElement('div');
    head.className = 'detail-head';
    const title = document.createElement('strong');
    title.textContent = 'Cited reference details';
    const close = document.createElement('button');
    close.textContent = 'close';
    close.addEventListener('click', () => this.hide());
    head.append(title, close);
    this.el.appendChild(head);

    const list = document.createElement('dl');
    for (const [label, value] of payload.details) {
      const dt = document.createElement('dt');
      dt.textContent = label;
      const dd = document.createElement('dd');
      dd.textContent = value;
      list.append(dt, dd);
    }
    this.el.appendChild(list);
    this.el.hidden = false;
  }

  hide(): void {
    this.el.hidden = true;
  }

  get visible(): boolean {
    return !this.el.hidden;
  }
}
