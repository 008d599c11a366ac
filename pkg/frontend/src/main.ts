/**
 * Workbench shell: summary header, reference table with detail panel,
 * cluster review queue, and the year spectrum chart. The client holds no
 * authoritative state; everything shown is refetched from the API, and a
 * full page reload reproduces the same view.
 */

import { ApiClient } from './api.js';
import { BannerHost } from './banner.js';
import { RpysChart } from './chart.js';
import { ClusterReview } from './clusters.js';
import { DetailPanel } from './details.js';
import { CrTable } from './table.js';

export interface App {
  api: ApiClient;
  banners: BannerHost;
  table: CrTable;
  details: DetailPanel;
  clusters: ClusterReview;
  chart: RpysChart;
  refreshAll: () => Promise<void>;
}

export async function bootstrap(root: HTMLElement, base = ''): Promise<App> {
  const api = new ApiClient(base);
  const banners = new BannerHost(root);

  const header = document.createElement('header');
  const heading = document.createElement('h1');
  heading.textContent = 'crkit curation';
  const summaryLine = document.createElement('p');
  summaryLine.className = 'summary-line';
  const saveButton = document.createElement('button');
  saveButton.className = 'save-button';
  saveButton.textContent = 'Save working file';
  header.append(heading, summaryLine, saveButton);
  root.appendChild(header);

  const main = document.createElement('main');
  root.appendChild(main);

  const details = new DetailPanel(root);
  const refreshSummary = async (): Promise<void> => {
    try {
      const s = await api.summary();
      summaryLine.textContent =
        `${s.publications} publications, ${s.crs} cited references ` +
        `(${s.total_n_cr} occurrences), origin ${s.origin}, ` +
        `${s.multi_clusters} clusters, ${s.decisions} manual decisions` +
        (s.dirty ? ' [unsaved changes]' : '');
    } catch (err) {
      banners.show(err instanceof Error ? err.message : String(err));
    }
  };

  const table = new CrTable(main, api, banners, details);
  const clusters = new ClusterReview(main, api, banners, async () => {
    await Promise.all([table.refresh(), chart.refresh(), refreshSummary()]);
  });
  const chart = new RpysChart(main, api, banners, async () => {
    await Promise.all([table.refresh(), clusters.refresh(), refreshSummary()]);
  });

  saveButton.addEventListener('click', () => {
    void api
      .save()
      .then(() => Promise.all([refreshSummary()]))
      .then(() => banners.show('working file saved', 'info'))
      .catch((err) => banners.show(err instanceof Error ? err.message : String(err)));
  });

  const refreshAll = async (): Promise<void> => {
    await Promise.all([table.refresh(), clusters.refresh(), chart.refresh(), refreshSummary()]);
  };
  await refreshAll();
  return { api, banners, table, details, clusters, chart, refreshAll };
}

const mount = typeof document !== 'undefined' ? document.getElementById('app') : null;
if (mount !== null) {
  void bootstrap(mount);
}
