"""Fixed prompt strings; bit-exact, covered by checksum tests.

``PROMPT_TEMPLATE_VERSION`` participates in cache keys so any future edit
to these strings invalidates cached scores.
"""

from __future__ import annotations

from ..backends.types import count_tokens
from ..errors import EmptyCaptionError

PROMPT_TEMPLATE_VERSION = "1"

PERSPECTIVE_PREFIX = (
    "I want a remote sensing image with a realistic satellite perspective view."
)
PERSPECTIVE_SUFFIX = (
    "Remember, I want a vertical remote sensing satellite perspective "
    "from top to bottom."
)

_TASK_PROMPT = (
    "You are a professional expert in remote sensing, specializing in image "
    "captioning. Given a remote sensing image, your goal is to generate an "
    "informative and highly accurate description.\n"
    "\n"
    "Guidelines:\n"
    "- Extract key objects and visual details as comprehensively as possible.\n"
    "- Describe the attributes of objects in detail, including quantity, "
    "color, material, shape, size, as well as absolute and relative spatial "
    "positions.\n"
    "- Strictly avoid hallucinated content, inaccuracies, and irrelevant "
    "information. Highlight essential visual elements without describing "
    "subjective feelings or atmosphere.\n"
    "- Adopt a macro-to-micro structure: first describe the overall scene, "
    "followed by specific objects.\n"
    "- Ensure the output is coherent, logically structured, and concise."
)


def task_prompt() -> str:
    """The captioning guideline prompt handed to the MLLM, byte-exact."""
    return _TASK_PROMPT


def truncate_caption(caption: str, max_prompt_tokens: int,
                     token_counter=count_tokens) -> str:
    """Trim the caption so the fully wrapped prompt fits the token budget.

    The template prefix and suffix are always preserved; only the caption
    shrinks. Counting is whitespace-token based unless a backend supplies
    an exact counter.
    """
    caption = caption.strip()
    if not caption:
        raise EmptyCaptionError("caption is empty")
    template_tokens = token_counter(PERSPECTIVE_PREFIX) + token_counter(PERSPECTIVE_SUFFIX)
    budget = max(0, max_prompt_tokens - template_tokens)
    if token_counter(caption) <= budget:
        return caption
    return " ".join(caption.split()[:budget])


def wrap_perspective_prompt(caption: str, max_prompt_tokens: int = 512,
                            token_counter=count_tokens) -> str:
    """Embed the caption in the fixed perspective-constraint template."""
    caption = truncate_caption(caption, max_prompt_tokens, token_counter)
    return f"{PERSPECTIVE_PREFIX} {caption} {PERSPECTIVE_SUFFIX}"
