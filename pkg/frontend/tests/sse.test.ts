import { describe, expect, it } from 'vitest';

import { SseParser, readEventStream } from '../src/sse';
import type { ProgressEvent } from '../src/types';

function event(seq: number): ProgressEvent {
  return {
    seq,
    session_id: 's1',
    stage: 'Doc',
    unit_id: 'u1',
    step: 'text',
    status: 'started',
    detail: '',
  };
}

function block(e: ProgressEvent): string {
  return `id: ${e.seq}\nevent: progress\ndata: ${JSON.stringify(e)}\n\n`;
}

describe('SseParser', () => {
  it('parses a complete event block', () => {
    const parser = new SseParser();
    const events = parser.feed(block(event(1)));
    expect(events).toEqual([event(1)]);
  });

  it('parses several blocks from one chunk', () => {
    const parser = new SseParser();
    const events = parser.feed(block(event(1)) + block(event(2)) + block(event(3)));
    expect(events.map((e) => e.seq)).toEqual([1, 2, 3]);
  });

  it('buffers partial blocks across feeds', () => {
    const parser = new SseParser();
    const raw = block(event(7));
    const cut = raw.indexOf('data: ') + 10;
    expect(parser.feed(raw.slice(0, cut))).toEqual([]);
    expect(parser.feed(raw.slice(cut))).toEqual([event(7)]);
  });

  it('ignores blocks without a data line', () => {
    const parser = new SseParser();
    expect(parser.feed(': keepalive\n\n')).toEqual([]);
    expect(parser.feed(block(event(2)))).toEqual([event(2)]);
  });

  it('joins multi-line data payloads', () => {
    const parser = new SseParser();
    const payload = { a: 1 };
    const events = parser.feed('data: {"a":\ndata: 1}\n\n');
    expect(events).toEqual([payload]);
  });
});

describe('readEventStream', () => {
  it('decodes a streamed body into events', async () => {
    const raw = block(event(1)) + block(event(2));
    const body = new Response(raw).body!;
    const seen: ProgressEvent[] = [];
    await readEventStream(body, (e) => seen.push(e));
    expect(seen.map((e) => e.seq)).toEqual([1, 2]);
  });
});
