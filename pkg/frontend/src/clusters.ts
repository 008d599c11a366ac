/**
 * Cluster review queue: biggest clusters first, pair scores visible,
 * same/different verdicts posted to the server, view refreshed with the
 * server's recomputed partition so each decision is made against current
 * state. A 409 (stale ids after a merge) reloads the queue.
 */

import { ApiClient, ApiError, Cluster, VerdictName } from './api.js';
import type { BannerHost } from './banner.js';

export class ClusterReview {
  readonly el: HTMLElement;
  clusters: Cluster[] = [];

  constructor(
    parent: HTMLElement,
    private readonly api: ApiClient,
    private readonly banners: BannerHost,
    private readonly onMutation: () => Promise<void> = async () => {},
  ) {
    this.el = document.createElement('section');
    this.el.className = 'cluster-review';
    parent.appendChild(this.el);
  }

  async refresh(): Promise<void> {
    try {
      this.clusters = (await this.api.clusters(2)).clusters;
      this.render();
    } catch (err) {
      this.banners.show(err instanceof Error ? err.message : String(err));
    }
  }

  async decide(a: string, b: string, verdict: VerdictName): Promise<void> {
    try {
      await this.api.decide(a, b, verdict);
      await this.refresh();
      await this.onMutation();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.banners.show('that pair was merged away; reloading clusters');
        await this.refresh();
        return;
      }
      this.banners.show(err instanceof Error ? err.message : String(err));
    }
  }

  async merge(): Promise<void> {
    try {
      const summary = await this.api.merge();
      this.banners.show(
        `merged clusters; ${summary.crs} cited references remain, ` +
          `${summary.total_n_cr} occurrences conserved`,
        'info',
      );
      await this.refresh();
      await this.onMutation();
    } catch (err) {
      this.banners.show(err instanceof Error ? err.message : String(err));
    }
  }

  private render(): void {
    this.el.replaceChildren();
    const head = document.createElement('div');
    head.className = 'cluster-head';
    const title = document.createElement('h2');
    title.textContent = `Clusters to review (${this.clusters.length})`;
    const mergeButton = document.createElement('button');
    mergeButton.className = 'merge-button';
    mergeButton.textContent = 'Merge all clusters';
    mergeButton.addEventListener('click', () => void this.merge());
    head.append(title, mergeButton);
    this.el.appendChild(head);

    if (this.clusters.length === 0) {
      const empty = document.createElement('p');
      empty.className = 'empty-state';
      empty.textContent = 'no multi-member clusters; run clustering or lower the threshold';
      this.el.appendChild(empty);
      return;
    }

    for (const cluster of this.clusters) {
      this.el.appendChild(this.renderCluster(cluster));
    }
  }

  private renderCluster(cluster: Cluster): HTMLElement {
    const card = document.createElement('article');
    card.className = 'cluster-card';
    card.dataset.clusterId = cluster.id;

    const caption = document.createElement('h3');
    caption.textContent = `cluster ${cluster.id} (${cluster.size} members)`;
    card.appendChild(caption);

    const members = document.createElement('ul');
    members.className = 'cluster-members';
    for (const member of cluster.members) {
      const item = document.createElement('li');
      item.dataset.crId = member.id;
      item.textContent =
        `${member.authors.join('; ') || '(no authors)'} ` +
        `${member.rpy ?? ''} ${member.source ?? member.title ?? ''} [n_cr ${member.n_cr}]`;
      members.appendChild(item);
    }
    card.appendChild(members);

    for (const pair of cluster.pairs) {
      const row = document.createElement('div');
      row.className = 'pair-row';
      row.dataset.pair = `${pair.a}|${pair.b}`;
      const label = document.createElement('span');
      label.textContent = `pair score ${pair.score.toFixed(3)}`;
      const same = document.createElement('button');
      same.textContent = 'same';
      same.className = 'decide-same';
      same.addEventListener('click', () => void this.decide(pair.a, pair.b, 'SAME'));
      const different = document.createElement('button');
      different.textContent = 'different';
      different.className = 'decide-different';
      different.addEventListener('click', () => void this.decide(pair.a, pair.b, 'DIFFERENT'));
      row.append(label, same, different);
      card.appendChild(row);
    }
    return card;
  }

  displayedPartition(): Map<string, string> {
    const partition = new Map<string, string>();
    for (const card of this.el.querySelectorAll('.cluster-card')) {
      const clusterId = (card as HTMLElement).dataset.clusterId ?? '';
      for (const item of card.querySelectorAll('li')) {
        partition.set((item as HTMLElement).dataset.crId ?? '', clusterId);
      }
    }
    return partition;
  }
}
