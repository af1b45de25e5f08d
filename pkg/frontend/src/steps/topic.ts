import type { Controller } from '../controller';

export function renderTopicStep(root: HTMLElement, controller: Controller): void {
  const state = controller.store.get();
  const form = document.createElement('form');
  form.className = 'topic-form';

  const label = document.createElement('label');
  label.textContent = 'What should the document teach?';
  label.htmlFor = 'topic-input';

  const input = document.createElement('input');
  input.id = 'topic-input';
  input.type = 'text';
  input.placeholder = 'e.g. Why does a gyroscope resist tipping?';
  input.value = state.session?.topic ?? '';

  const submit = document.createElement('button');
  submit.type = 'submit';
  submit.textContent = 'Plan document';
  submit.disabled = state.busy;

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const topic = input.value.trim();
    if (topic) void controller.submitTopic(topic);
  });

  form.append(label, input, submit);
  root.appendChild(form);
}
