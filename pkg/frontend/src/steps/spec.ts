import type { Controller } from '../controller';

// Spec review: unit list with reorder and summary editing, plus chat-based
// edits in natural language. Continuing generates the style palette.
export function renderSpecStep(root: HTMLElement, controller: Controller): void {
  const state = controller.store.get();
  const spec = state.spec;
  if (!spec) {
    root.textContent = 'No plan yet. Set a topic first.';
    return;
  }

  const heading = document.createElement('h2');
  heading.textContent = `Plan for: ${spec.topic}`;
  root.appendChild(heading);

  if (!state.validationOk) {
    const warning = document.createElement('p');
    warning.className = 'validation-warning';
    warning.textContent = 'The current plan has validation problems.';
    root.appendChild(warning);
  }

  const list = document.createElement('ol');
  list.className = 'unit-list';
  spec.units.forEach((unit, index) => {
    const item = document.createElement('li');
    item.dataset.unitId = unit.id;

    const summary = document.createElement('strong');
    summary.textContent = unit.summary;
    const description = document.createElement('p');
    description.textContent = unit.text_description;
    const mechanics = document.createElement('small');
    const kinds = unit.interaction.state
      .filter((v) => v.kind === 'controlled')
      .map((v) => v.control)
      .join(', ');
    mechanics.textContent = kinds ? `controls: ${kinds}` : 'no controls';

    const up = document.createElement('button');
    up.textContent = 'Move up';
    up.className = 'move-up';
    up.disabled = index === 0 || state.busy;
    up.addEventListener('click', () => {
      const order = spec.units.map((_, i) => i + 1);
      [order[index - 1], order[index]] = [order[index], order[index - 1]];
      void controller.applySpecOps([{ op: 'reorder_units', permutation: order }]);
    });

    item.append(summary, description, mechanics, up);
    list.appendChild(item);
  });
  root.appendChild(list);

  const chat = document.createElement('form');
  chat.className = 'spec-chat';
  const chatInput = document.createElement('input');
  chatInput.type = 'text';
  chatInput.placeholder = 'Describe a change to the plan...';
  const chatSend = document.createElement('button');
  chatSend.type = 'submit';
  chatSend.textContent = 'Apply edit';
  chat.addEventListener('submit', (event) => {
    event.preventDefault();
    const message = chatInput.value.trim();
    if (message) void controller.sendChat(message, 'spec');
  });
  chat.append(chatInput, chatSend);
  root.appendChild(chat);

  const next = document.createElement('button');
  next.className = 'continue';
  next.textContent = 'Continue to styling';
  next.disabled = state.busy || !state.validationOk;
  next.addEventListener('click', () => void controller.openStyleStage());
  root.appendChild(next);
}
