/**
 * Sortable cited-reference table.
 *
 * Column header clicks toggle server-side sorting (the server collates rows
 * without the sort value last, so fragmented references group together at
 * the end). Arrow keys move the selection, space opens the detail panel for
 * the selected row. The table renders exactly what the server returns.
 */

import { ApiClient, ApiError, CrRow, SortDir, SortKey } from './api.js';
import type { BannerHost } from './banner.js';
import type { DetailPanel } from './details.js';

const COLUMNS: { label: string; key?: SortKey }[] = [
  { label: 'authors', key: 'authors' },
  { label: 'rpy', key: 'rpy' },
  { label: 'title' },
  { label: 'source' },
  { label: 'volume' },
  { label: 'page' },
  { label: 'n_cr', key: 'n_cr' },
  { label: 'cluster' },
];

export class CrTable {
  readonly el: HTMLElement;
  sort: SortKey = 'authors';
  dir: SortDir = 'asc';
  offset = 0;
  total = 0;
  rows: CrRow[] = [];
  selectedId: string | null = null;

  private readonly status: HTMLElement;
  private readonly tableEl: HTMLTableElement;

  constructor(
    parent: HTMLElement,
    private readonly api: ApiClient,
    private readonly banners: BannerHost,
    private readonly details: DetailPanel,
    readonly pageSize = 25,
  ) {
    this.el = document.createElement('section');
    this.el.className = 'cr-table';
    this.el.tabIndex = 0;
    this.el.addEventListener('keydown', (ev) => this.handleKey(ev));

    const nav = document.createElement('div');
    nav.className = 'table-nav';
    const prev = document.createElement('button');
    prev.textContent = 'prev';
    prev.addEventListener('click', () => void this.page(-1));
    const next = document.createElement('button');
    next.textContent = 'next';
    next.addEventListener('click', () => void this.page(1));
    this.status = document.createElement('span');
    this.status.className = 'table-status';
    nav.append(prev, next, this.status);

    this.tableEl = document.createElement('table');
    this.el.append(nav, this.tableEl);
    parent.appendChild(this.el);
  }

  async refresh(): Promise<void> {
    try {
      const page = await this.api.listCrs({
        sort: this.sort,
        dir: this.dir,
        offset: this.offset,
        limit: this.pageSize,
      });
      this.rows = page.rows;
      this.total = page.total;
      if (this.selectedId !== null && !this.rows.some((r) => r.id === this.selectedId)) {
        this.selectedId = null;
      }
      this.render();
    } catch (err) {
      this.banners.show(err instanceof Error ? err.message : String(err));
    }
  }

  async toggleSort(key: SortKey): Promise<void> {
    if (this.sort === key) {
      this.dir = this.dir === 'asc' ? 'desc' : 'asc';
    } else {
      this.sort = key;
      this.dir = 'asc';
    }
    this.offset = 0;
    await this.refresh();
  }

  private async page(step: number): Promise<void> {
    const next = this.offset + step * this.pageSize;
    if (next < 0 || next >= Math.max(this.total, 1)) return;
    this.offset = next;
    await this.refresh();
  }

  select(id: string | null): void {
    this.selectedId = id !== null && this.rows.some((r) => r.id === id) ? id : null;
    this.paintSelection();
  }

  private moveSelection(delta: number): void {
    if (this.rows.length === 0) return;
    const index = this.rows.findIndex((r) => r.id === this.selectedId);
    const next = index === -1 ? (delta > 0 ? 0 : this.rows.length - 1)
      : Math.min(this.rows.length - 1, Math.max(0, index + delta));
    this.select(this.rows[next]?.id ?? null);
  }

  async openDetails(): Promise<void> {
    if (this.selectedId === null) return;
    try {
      this.details.show(await this.api.crDetails(this.selectedId));
    } catch (err) {
      if (err instanceof ApiError) this.banners.show(err.message);
      else throw err;
    }
  }

  handleKey(ev: KeyboardEvent): void {
    if (ev.key === 'ArrowDown') {
      ev.preventDefault();
      this.moveSelection(1);
    } else if (ev.key === 'ArrowUp') {
      ev.preventDefault();
      this.moveSelection(-1);
    } else if (ev.key === ' ') {
      ev.preventDefault();
      void this.openDetails();
    }
  }

  private render(): void {
    this.tableEl.replaceChildren();
    const thead = document.createElement('thead');
    const headRow = document.createElement('tr');
    for (const column of COLUMNS) {
      const th = document.createElement('th');
      if (column.key) {
        const button = document.createElement('button');
        button.className = 'sort-button';
        button.dataset.sortKey = column.key;
        const marker = this.sort === column.key ? (this.dir === 'asc' ? ' ▲' : ' ▼') : '';
        button.textContent = column.label + marker;
        const key = column.key;
        button.addEventListener('click', () => void this.toggleSort(key));
        th.appendChild(button);
      } else {
        th.textContent = column.label;
      }
      headRow.appendChild(th);
    }
    thead.appendChild(headRow);

    const tbody = document.createElement('tbody');
    for (const row of this.rows) {
      const tr = document.createElement('tr');
      tr.dataset.crId = row.id;
      const cells = [
        row.authors.join('; '),
        row.rpy === null ? '' : String(row.rpy),
        row.title ?? '',
        row.source ?? '',
        row.volume ?? '',
        row.page ?? '',
        String(row.n_cr),
        row.cluster,
      ];
      for (const value of cells) {
        const td = document.createElement('td');
        td.textContent = value;
        tr.appendChild(td);
      }
      tr.addEventListener('click', () => this.select(row.id));
      tbody.appendChild(tr);
    }
    this.tableEl.append(thead, tbody);
    const last = Math.min(this.offset + this.rows.length, this.total);
    this.status.textContent = `${this.offset + 1}-${last} of ${this.total}`;
    this.paintSelection();
  }

  private paintSelection(): void {
    for (const tr of this.tableEl.querySelectorAll('tbody tr')) {
      tr.classList.toggle('selected', (tr as HTMLElement).dataset.crId === this.selectedId);
    }
  }

  renderedIds(): string[] {
    return Array.from(this.tableEl.querySelectorAll('tbody tr')).map(
      (tr) => (tr as HTMLElement).dataset.crId ?? '',
    );
  }
}
