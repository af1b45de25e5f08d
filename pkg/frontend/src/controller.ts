import { ApiError, Client } from './api';
import { Store } from './store';
import type { Choice, StylePalette, StyleSelection } from './types';

// Orchestrates API calls and state transitions for the four-stage flow.
export class Controller {
  constructor(public client: Client, public store: Store) {}

  private async guarded<T>(work: () => Promise<T>): Promise<T | null> {
    this.store.set({ busy: true, error: null });
    try {
      return await work();
    } catch (err) {
      const message =
        err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
      this.store.set({ error: message });
      return null;
    } finally {
      this.store.set({ busy: false });
    }
  }

  async startSession(): Promise<void> {
    await this.guarded(async () => {
      const session = await this.client.createSession();
      this.store.reset();
      this.store.set({ session, activeStage: 'Topic' });
    });
  }

  async resumeSession(sid: string): Promise<void> {
    await this.guarded(async () => {
      const session = await this.client.getSession(sid);
      this.store.set({ session, activeStage: session.stage });
      if (session.has_spec) await this.refreshSpec();
      if (session.has_palette) await this.refreshPalette();
      if (session.has_document) await this.refreshDocument();
    });
  }

  async submitTopic(topic: string): Promise<void> {
    const sid = this.requireSession();
    await this.guarded(async () => {
      await this.client.setTopic(sid, topic);
      const session = await this.client.getSession(sid);
      this.store.set({ session, activeStage: 'Spec' });
      await this.refreshSpec();
    });
  }

  async refreshSpec(): Promise<void> {
    const sid = this.requireSession();
    const resp = await this.client.getSpec(sid);
    this.store.set({ spec: resp.spec, validationOk: resp.validation.ok });
  }

  async applySpecOps(ops: Record<string, unknown>[]): Promise<void> {
    const sid = this.requireSession();
    await this.guarded(async () => {
      const resp = await this.client.patchSpec(sid, ops);
      this.store.set({ spec: resp.spec });
      if (resp.document_stale && this.store.get().document) {
        const doc = this.store.get().document!;
        this.store.set({ document: { ...doc, stale: true } });
      }
    });
  }

  async openStyleStage(): Promise<void> {
    const sid = this.requireSession();
    await this.guarded(async () => {
      const palette = await this.client.generatePalette(sid);
      const session = await this.client.getSession(sid);
      this.store.set({
        palette,
        paletteStale: false,
        selection: allAuto(palette),
        session,
        activeStage: 'Style',
      });
    });
  }

  async refreshPalette(): Promise<void> {
    const sid = this.requireSession();
    const resp = await this.client.getPalette(sid);
    this.store.set({
      palette: resp.palette,
      paletteStale: resp.stale,
      selection: this.store.get().selection ?? allAuto(resp.palette),
    });
  }

  chooseStyle(dimensionId: string, choice: Choice): void {
    const selection = this.store.get().selection ?? { choices: {} };
    this.store.set({
      selection: {
        choices: { ...selection.choices, [dimensionId]: choice },
      },
    });
  }

  async generateDocument(): Promise<void> {
    const sid = this.requireSession();
    await this.guarded(async () => {
      const selection = this.store.get().selection;
      if (selection) await this.client.putSelection(sid, selection);
      this.store.set({ progress: [] });
      const streaming = this.client
        .streamEvents(sid, lastSeq(this.store), (event) => {
          this.store.set({ progress: [...this.store.get().progress, event] });
        })
        .catch(() => undefined); // progress display is best-effort
      await this.client.generateDocument(sid);
      await streaming;
      const session = await this.client.getSession(sid);
      this.store.set({ session, activeStage: 'Doc' });
      await this.refreshDocument();
    });
  }

  async refreshDocument(): Promise<void> {
    const sid = this.requireSession();
    const document = await this.client.getDocument(sid);
    this.store.set({ document });
  }

  async sendChat(message: string, target: 'spec' | 'doc'): Promise<void> {
    const sid = this.requireSession();
    await this.guarded(async () => {
      await this.client.chat(sid, message, target);
      const session = await this.client.getSession(sid);
      this.store.set({ session });
      if (target === 'spec') {
        await this.refreshSpec();
        if (session.has_document) await this.refreshDocument();
      } else {
        await this.refreshDocument();
      }
    });
  }

  async runEval(): Promise<void> {
    const sid = this.requireSession();
    await this.guarded(async () => {
      const evalReport = await this.client.runEval(sid);
      this.store.set({ evalReport });
    });
  }

  private requireSession(): string {
    const session = this.store.get().session;
    if (!session) throw new Error('no active session');
    return session.id;
  }
}

export function allAuto(palette: StylePalette): StyleSelection {
  const choices: StyleSelection['choices'] = {};
  for (const dim of [...palette.writing, ...palette.interaction]) {
    choices[dim.id] = { mode: 'auto' };
  }
  return { choices };
}

function lastSeq(store: Store): number {
  const progress = store.get().progress;
  return progress.length ? progress[progress.length - 1].seq : 0;
}
