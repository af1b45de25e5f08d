"""Hand-built pages with known interaction-functionality outcomes.

Each fixture freezes the expected responsive ratio, worked out by hand from
which controls actually mutate the page outside their own value state."""


def page(body: str) -> str:
    return ("<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
            "<title>fixture</title></head><body>\n" + body + "\n</body></html>")


LIVE_SLIDER = """
<input type="range" min="0" max="10" value="2" id="ls">
<span id="ls-out">2</span>
<script>
  var ls = document.getElementById('ls');
  ls.addEventListener('input', function () {
    document.getElementById('ls-out').textContent = ls.value;
  });
</script>
"""

LIVE_BUTTON = """
<button id="lb">Add one</button>
<span id="lb-out">0</span>
<script>
  var n = 0;
  document.getElementById('lb').addEventListener('click', function () {
    n += 1;
    document.getElementById('lb-out').textContent = String(n);
  });
</script>
"""

LIVE_CHECKBOX = """
<input type="checkbox" id="lc">
<script>
  document.getElementById('lc').addEventListener('change', function (e) {
    document.body.setAttribute('data-mode', e.target.checked ? 'on' : 'off');
  });
</script>
"""

LIVE_SELECT = """
<select id="lsel"><option>red</option><option>green</option></select>
<span id="lsel-out">red</span>
<script>
  var sel = document.getElementById('lsel');
  sel.addEventListener('change', function () {
    document.getElementById('lsel-out').textContent = sel.value;
  });
</script>
"""

DEAD_BUTTON = '<button id="db">Does nothing</button>'
DEAD_SLIDER = '<input type="range" min="0" max="10" value="3" id="ds">'
DEAD_CHECKBOX = '<input type="checkbox" id="dc">'
DEAD_SELECT = '<select id="dsel"><option>a</option><option>b</option></select>'

DISABLED_BUTTON = """
<button id="xb" disabled>Unavailable</button>
<script>
  document.getElementById('xb').addEventListener('click', function () {
    document.body.setAttribute('data-clicked', 'yes');
  });
</script>
"""


# name -> (html, expected score, element count, responsive count, flags)
IF_FIXTURES = {
    "two-live": (page(LIVE_SLIDER + LIVE_BUTTON), 1.0, 2, 2, []),
    "half-dead": (page(LIVE_BUTTON + DEAD_BUTTON), 0.5, 2, 1, []),
    "all-dead": (page(DEAD_SLIDER + DEAD_CHECKBOX), 0.0, 2, 0, []),
    "no-controls": (page("<p>Prose only, nothing to poke.</p>"),
                    0.0, 0, 0, ["NoElements"]),
    "self-only-slider": (page(DEAD_SLIDER + LIVE_CHECKBOX), 0.5, 2, 1, []),
    "dead-select": (page(DEAD_SELECT + LIVE_SELECT), 0.5, 2, 1, []),
    "disabled-button": (page(DISABLED_BUTTON + LIVE_BUTTON), 0.5, 2, 1, []),
    "one-in-three": (page(DEAD_BUTTON + LIVE_SLIDER + DEAD_CHECKBOX),
                     1 / 3, 3, 1, []),
}
