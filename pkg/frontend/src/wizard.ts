import type { Controller } from './controller';
import { STAGES } from './store';
import { renderDocStep } from './steps/doc';
import { renderSpecStep } from './steps/spec';
import { renderStyleStep } from './steps/style';
import { renderTopicStep } from './steps/topic';
import type { Stage } from './types';

const STEP_RENDERERS: Record<Stage, (root: HTMLElement, c: Controller) => void> = {
  Topic: renderTopicStep,
  Spec: renderSpecStep,
  Style: renderStyleStep,
  Doc: renderDocStep,
};

const STAGE_TITLES: Record<Stage, string> = {
  Topic: '1. Topic',
  Spec: '2. Plan',
  Style: '3. Style',
  Doc: '4. Document',
};

export function renderWizard(root: HTMLElement, controller: Controller): void {
  const container = document.createElement('div');
  container.className = 'wizard';

  const nav = document.createElement('nav');
  nav.className = 'wizard-nav';

  const banner = document.createElement('div');
  banner.className = 'wizard-banner';

  const content = document.createElement('section');
  content.className = 'wizard-content';

  container.append(nav, banner, content);
  root.appendChild(container);

  function sync(): void {
    const state = controller.store.get();

    nav.innerHTML = '';
    for (const stage of STAGES) {
      const button = document.createElement('button');
      button.textContent = STAGE_TITLES[stage];
      button.dataset.stage = stage;
      const reachable = controller.store.canVisit(stage);
      button.disabled = !reachable || state.busy;
      if (stage === state.activeStage) button.classList.add('active');
      button.addEventListener('click', () => {
        if (controller.store.canVisit(stage)) {
          controller.store.set({ activeStage: stage });
        }
      });
      nav.appendChild(button);
    }

    banner.innerHTML = '';
    if (state.error) {
      const error = document.createElement('p');
      error.className = 'error';
      error.textContent = state.error;
      banner.appendChild(error);
    }
    if (state.busy) {
      const busy = document.createElement('p');
      busy.className = 'busy';
      busy.textContent = 'Working...';
      banner.appendChild(busy);
    }

    content.innerHTML = '';
    STEP_RENDERERS[state.activeStage](content, controller);
  }

  sync();
  controller.store.subscribe(sync);
}
