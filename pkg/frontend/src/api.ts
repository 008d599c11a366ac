/**
 * Typed client for the curation JSON API.
 *
 * The server is the single source of truth: every number shown in the UI is
 * fetched from here, never derived client-side. Mutating calls are funneled
 * through one queue so at most one is in flight at a time.
 */

export interface CrRow {
  id: string;
  authors: string[];
  title: string | null;
  source: string | null;
  rpy: number | null;
  volume: string | null;
  page: string | null;
  doi: string | null;
  n_cr: number;
  origin: string;
  cluster: string;
}

export interface CrPage {
  total: number;
  offset: number;
  limit: number;
  rows: CrRow[];
}

export interface DetailPayload {
  id: string;
  details: [string, string][];
}

export interface PairScore {
  a: string;
  b: string;
  score: number;
}

export interface Cluster {
  id: string;
  size: number;
  members: CrRow[];
  pairs: PairScore[];
}

export interface SpectrumRow {
  rpy: number;
  n_cr: number;
  median_dev: number;
}

export interface Spectrum {
  rows: SpectrumRow[];
  excluded_n_cr: number;
}

export interface Summary {
  publications: number;
  crs: number;
  total_n_cr: number;
  origin: string;
  dirty: boolean;
  decisions: number;
  multi_clusters: number;
}

export type SortKey = 'authors' | 'rpy' | 'n_cr';
export type SortDir = 'asc' | 'desc';
export type VerdictName = 'SAME' | 'DIFFERENT';

export class ApiError extends Error {
  constructor(public readonly status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    if (body && typeof body.detail === 'string') return body.detail;
  } catch {
    /* non-JSON error body */
  }
  return `request failed with status ${response.status}`;
}

export class ApiClient {
  /** Pending mutation gate: keeps mutating requests strictly sequential. */
  private mutationTail: Promise<unknown> = Promise.resolve();

  constructor(private readonly base: string = '') {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) throw new ApiError(response.status, await errorDetail(response));
    return (await response.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    const run = async (): Promise<T> => {
      const response = await fetch(this.base + path, {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: body === undefined ? null : JSON.stringify(body),
      });
      if (!response.ok) throw new ApiError(response.status, await errorDetail(response));
      return (await response.json()) as T;
    };
    const next = this.mutationTail.catch(() => undefined).then(run);
    this.mutationTail = next;
    return next;
  }

  summary(): Promise<Summary> {
    return this.get('/api/summary');
  }

  listCrs(opts: {
    sort: SortKey;
    dir: SortDir;
    offset: number;
    limit: number;
    rpy?: number;
  }): Promise<CrPage> {
    const params = new URLSearchParams({
      sort: opts.sort,
      dir: opts.dir,
      offset: String(opts.offset),
      limit: String(opts.limit),
    });
    if (opts.rpy !== undefined) params.set('rpy', String(opts.rpy));
    return this.get(`/api/crs?${params.toString()}`);
  }

  crDetails(id: string): Promise<DetailPayload> {
    return this.get(`/api/crs/${encodeURIComponent(id)}`);
  }

  clusters(minSize = 2): Promise<{ clusters: Cluster[] }> {
    return this.get(`/api/clusters?min_size=${minSize}`);
  }

  rpys(): Promise<Spectrum> {
    return this.get('/api/rpys');
  }

  decide(a: string, b: string, verdict: VerdictName): Promise<{ affected: Cluster[] }> {
    return this.post('/api/decisions', { a, b, verdict });
  }

  merge(): Promise<Summary> {
    return this.post('/api/merge');
  }

  removeYears(from: number, to: number, keepMissing = true): Promise<Summary> {
    return this.post('/api/remove-rpy', { from, to, keep_missing: keepMissing });
  }

  save(): Promise<{ saved: string; dirty: boolean }> {
    return this.post('/api/save');
  }
}
