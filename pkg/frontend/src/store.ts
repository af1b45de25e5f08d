import type {
  DocSpec,
  DocumentView,
  EvalReport,
  ProgressEvent,
  SessionView,
  Stage,
  StyleSelection,
  StylePalette,
} from './types';

export interface AppState {
  session: SessionView | null;
  activeStage: Stage;
  spec: DocSpec | null;
  validationOk: boolean;
  palette: StylePalette | null;
  paletteStale: boolean;
  selection: StyleSelection | null;
  document: DocumentView | null;
  evalReport: EvalReport | null;
  progress: ProgressEvent[];
  busy: boolean;
  error: string | null;
}

export const STAGES: Stage[] = ['Topic', 'Spec', 'Style', 'Doc'];

export function stageIndex(stage: Stage): number {
  return STAGES.indexOf(stage);
}

const initial: AppState = {
  session: null,
  activeStage: 'Topic',
  spec: null,
  validationOk: true,
  palette: null,
  paletteStale: false,
  selection: null,
  document: null,
  evalReport: null,
  progress: [],
  busy: false,
  error: null,
};

export class Store {
  private state: AppState = { ...initial };
  private listeners = new Set<(state: AppState) => void>();

  get(): AppState {
    return this.state;
  }

  set(patch: Partial<AppState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  reset(): void {
    this.set({ ...initial });
  }

  subscribe(listener: (state: AppState) => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  // A stage tab is reachable once the session has progressed that far.
  canVisit(stage: Stage): boolean {
    const reached = this.state.session ? stageIndex(this.state.session.stage) : 0;
    return stageIndex(stage) <= reached;
  }
}
