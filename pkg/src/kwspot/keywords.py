"""Canonical keyword vocabulary shared by the model and the interpreter."""

# Display order used for evaluation reports: color/control words first,
# then modifier and filler words.
KEYWORDS = (
    "blue",
    "cyan",
    "green",
    "led",
    "magenta",
    "off",
    "on",
    "red",
    "wake_up",
    "white",
    "yellow",
    "and",
    "blink",
    "cancel",
    "fast",
    "flash",
    "noise",
    "noise2",
    "plus",
    "quick",
    "slow",
    "toggle",
    "unknown",
)

KEYWORD_SET = frozenset(KEYWORDS)

# Labels that never carry command semantics: they absorb non-keyword audio.
FILLER_KEYWORDS = frozenset({"noise", "noise2", "unknown"})

# color keyword -> color code latched by the interpreter
COLOR_CODES = {
    "blue": 1,
    "green": 2,
    "cyan": 3,
    "red": 4,
    "magenta": 5,
    "yellow": 6,
    "white": 7,
}

# color code -> saturated RGB triple shown on the virtual LED
CODE_RGB = {
    1: (0, 0, 255),
    2: (0, 255, 0),
    3: (0, 255, 255),
    4: (255, 0, 0),
    5: (255, 0, 255),
    6: (255, 255, 0),
    7: (255, 255, 255),
}
