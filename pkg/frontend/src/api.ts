import { readEventStream } from './sse';
import type {
  ChatResponse,
  DocSpec,
  DocumentView,
  EvalReport,
  ProgressEvent,
  SessionView,
  SpecResponse,
  StylePalette,
  StyleSelection,
} from './types';

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }
}

type FetchLike = typeof fetch;

export class Client {
  constructor(
    private baseUrl: string = '',
    private fetchImpl: FetchLike = fetch.bind(globalThis)
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown
  ): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { 'Content-Type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const payload = await resp.json();
        if (payload && typeof payload.detail === 'string') detail = payload.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  createSession(): Promise<SessionView> {
    return this.request('POST', '/sessions');
  }

  listSessions(): Promise<SessionView[]> {
    return this.request('GET', '/sessions');
  }

  getSession(sid: string): Promise<SessionView> {
    return this.request('GET', `/sessions/${sid}`);
  }

  setTopic(sid: string, topic: string): Promise<{ spec: DocSpec; stage: string }> {
    return this.request('POST', `/sessions/${sid}/topic`, { topic });
  }

  getSpec(sid: string): Promise<SpecResponse> {
    return this.request('GET', `/sessions/${sid}/spec`);
  }

  patchSpec(
    sid: string,
    ops: Record<string, unknown>[]
  ): Promise<{ spec: DocSpec; document_stale: boolean }> {
    return this.request('PATCH', `/sessions/${sid}/spec`, { ops });
  }

  generatePalette(sid: string): Promise<StylePalette> {
    return this.request('POST', `/sessions/${sid}/palette`);
  }

  getPalette(sid: string): Promise<{ palette: StylePalette; stale: boolean }> {
    return this.request('GET', `/sessions/${sid}/palette`);
  }

  putSelection(sid: string, selection: StyleSelection): Promise<{ ok: boolean }> {
    return this.request('PUT', `/sessions/${sid}/selection`, selection);
  }

  generateDocument(
    sid: string
  ): Promise<{ total_chars: number; sections: string[]; stage: string }> {
    return this.request('POST', `/sessions/${sid}/document`);
  }

  getDocument(sid: string): Promise<DocumentView> {
    return this.request('GET', `/sessions/${sid}/document`);
  }

  downloadUrl(sid: string): string {
    return `${this.baseUrl}/sessions/${sid}/document/download`;
  }

  chat(sid: string, message: string, target: 'spec' | 'doc'): Promise<ChatResponse> {
    return this.request('POST', `/sessions/${sid}/chat`, { message, target });
  }

  runEval(sid: string): Promise<EvalReport> {
    return this.request('POST', `/sessions/${sid}/eval`);
  }

  async streamEvents(
    sid: string,
    after: number,
    onEvent: (event: ProgressEvent) => void
  ): Promise<void> {
    const resp = await this.fetchImpl(
      `${this.baseUrl}/sessions/${sid}/events?after=${after}`,
      { method: 'GET' }
    );
    if (!resp.ok || !resp.body) {
      throw new ApiError(resp.status, 'event stream unavailable');
    }
    await readEventStream(resp.body, onEvent);
  }
}
