/**
 * RPYS chart: occurrence bars and a median-deviation line over a contiguous
 * year axis. Hovering a year fetches its most cited references; a year-range
 * selection offers removal (with confirmation).
 */

import type { ApiClient, Spectrum } from './api.js';
import type { BannerHost } from './banner.js';

const SVG_NS = 'http://www.w3.org/2000/svg';
const HEIGHT = 160;
const BAR_W = 8;

export class RpysChart {
  readonly el: HTMLElement;
  spectrum: Spectrum | null = null;

  private readonly plot: HTMLElement;
  private readonly hoverList: HTMLElement;
  private readonly fromInput: HTMLInputElement;
  private readonly toInput: HTMLInputElement;

  constructor(
    parent: HTMLElement,
    private readonly api: ApiClient,
    private readonly banners: BannerHost,
    private readonly onMutation: () => Promise<void> = async () => {},
    private readonly confirmFn: (msg: string) => boolean = (msg) => window.confirm(msg),
  ) {
    this.el = document.createElement('section');
    this.el.className = 'rpys-chart';

    const title = document.createElement('h2');
    title.textContent = 'Reference publication years';
    this.plot = document.createElement('div');
    this.plot.className = 'plot';
    this.hoverList = document.createElement('div');
    this.hoverList.className = 'hover-list';

    const controls = document.createElement('div');
    controls.className = 'range-controls';
    this.fromInput = document.createElement('input');
    this.fromInput.type = 'number';
    this.fromInput.placeholder = 'from';
    this.toInput = document.createElement('input');
    this.toInput.type = 'number';
    this.toInput.placeholder = 'to';
    const removeButton = document.createElement('button');
    removeButton.className = 'remove-years';
    removeButton.textContent = 'Remove year range';
    removeButton.addEventListener('click', () => void this.removeSelectedYears());
    controls.append(this.fromInput, this.toInput, removeButton);

    this.el.append(title, this.plot, this.hoverList, controls);
    parent.appendChild(this.el);
  }

  async refresh(): Promise<void> {
    try {
      this.spectrum = await this.api.rpys();
      this.render();
    } catch (err) {
      this.banners.show(err instanceof Error ? err.message : String(err));
    }
  }

  private render(): void {
    this.plot.replaceChildren();
    this.hoverList.replaceChildren();
    const rows = this.spectrum?.rows ?? [];
    if (rows.length === 0) {
      const empty = document.createElement('p');
      empty.className = 'empty-state';
      empty.textContent = 'nothing to chart: the dataset has no reference publication years';
      this.plot.appendChild(empty);
      return;
    }

    const maxCount = Math.max(1, ...rows.map((r) => r.n_cr));
    const maxDev = Math.max(1, ...rows.map((r) => Math.abs(r.median_dev)));
    const svg = document.createElementNS(SVG_NS, 'svg');
    svg.setAttribute('width', String(rows.length * BAR_W + 40));
    svg.setAttribute('height', String(HEIGHT + 30));

    const points: string[] = [];
    rows.forEach((row, i) => {
      const x = 20 + i * BAR_W;
      const barH = (row.n_cr / maxCount) * HEIGHT;
      const bar = document.createElementNS(SVG_NS, 'rect');
      bar.setAttribute('class', 'bar');
      bar.setAttribute('data-rpy', String(row.rpy));
      bar.setAttribute('data-n-cr', String(row.n_cr));
      bar.setAttribute('x', String(x));
      bar.setAttribute('y', String(HEIGHT - barH));
      bar.setAttribute('width', String(BAR_W - 2));
      bar.setAttribute('height', String(Math.max(barH, 0.5)));
      bar.addEventListener('mouseenter', () => void this.hoverYear(row.rpy));
      bar.addEventListener('click', () => this.selectYear(row.rpy));
      svg.appendChild(bar);

      const devY = HEIGHT / 2 - (row.median_dev / maxDev) * (HEIGHT / 2 - 4);
      points.push(`${x + BAR_W / 2},${devY.toFixed(1)}`);

      if (row.rpy % 10 === 0) {
        const label = document.createElementNS(SVG_NS, 'text');
        label.setAttribute('x', String(x));
        label.setAttribute('y', String(HEIGHT + 22));
        label.setAttribute('class', 'year-label');
        label.textContent = String(row.rpy);
        svg.appendChild(label);
      }
    });

    const line = document.createElementNS(SVG_NS, 'polyline');
    line.setAttribute('class', 'deviation-line');
    line.setAttribute('points', points.join(' '));
    line.setAttribute('fill', 'none');
    svg.appendChild(line);
    this.plot.appendChild(svg);
  }

  private selectYear(year: number): void {
    if (this.fromInput.value === '' || Number(this.fromInput.value) > year) {
      this.fromInput.value = String(year);
    }
    if (this.toInput.value === '' || Number(this.toInput.value) < year) {
      this.toInput.value = String(year);
    }
  }

  async hoverYear(year: number): Promise<void> {
    try {
      const page = await this.api.listCrs({
        sort: 'n_cr',
        dir: 'desc',
        offset: 0,
        limit: 5,
        rpy: year,
      });
      this.hoverList.replaceChildren();
      const caption = document.createElement('strong');
      caption.textContent = `most cited in ${year}`;
      const list = document.createElement('ol');
      for (const row of page.rows) {
        const item = document.createElement('li');
        item.textContent = `${row.n_cr}× ${row.authors.join('; ') || '(no authors)'} ` +
          `${row.source ?? row.title ?? ''}`;
        list.appendChild(item);
      }
      this.hoverList.append(caption, list);
    } catch (err) {
      this.banners.show(err instanceof Error ? err.message : String(err));
    }
  }

  async removeSelectedYears(): Promise<void> {
    const from = Number(this.fromInput.value);
    const to = Number(this.toInput.value);
    if (this.fromInput.value === '' || this.toInput.value === '' || from > to) {
      this.banners.show('pick a year range first (from <= to)');
      return;
    }
    if (!this.confirmFn(`Remove all cited references from ${from} to ${to}?`)) return;
    try {
      await this.api.removeYears(from, to);
      this.fromInput.value = '';
      this.toInput.value = '';
      await this.refresh();
      await this.onMutation();
    } catch (err) {
      this.banners.show(err instanceof Error ? err.message : String(err));
    }
  }
}
