import type { ProgressEvent } from './types';

// Incremental parser for a text/event-stream body. Feed it raw chunks; it
// emits one record per blank-line-terminated event block.
export class SseParser {
  private buffer = '';

  feed(chunk: string): ProgressEvent[] {
    this.buffer += chunk;
    const events: ProgressEvent[] = [];
    let sep = this.buffer.indexOf('\n\n');
    while (sep >= 0) {
      const block = this.buffer.slice(0, sep);
      this.buffer = this.buffer.slice(sep + 2);
      const data = block
        .split('\n')
        .filter((line) => line.startsWith('data: '))
        .map((line) => line.slice('data: '.length))
        .join('\n');
      if (data) {
        events.push(JSON.parse(data) as ProgressEvent);
      }
      sep = this.buffer.indexOf('\n\n');
    }
    return events;
  }
}

export async function readEventStream(
  body: ReadableStream<Uint8Array>,
  onEvent: (event: ProgressEvent) => void
): Promise<void> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  const parser = new SseParser();
  for (;;) {
    const { done, value } = await reader.read();
    if (done) break;
    for (const event of parser.feed(decoder.decode(value, { stream: true }))) {
      onEvent(event);
    }
  }
}
