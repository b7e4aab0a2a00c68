"""Seeded synthetic counseling exchanges for development and testing.

Builds a small, regular corpus of client prompts with counselor
responses at all three reflection levels. Groups share a prompt, so
every non-reflective response has a complex-reflection sibling usable
as a rewrite reference. A configurable slice of responses mixes the
style markers of two levels and gets a coin-flip label, which caps the
accuracy any classifier can reach on held-out data.
"""

from __future__ import annotations

import random

from mi_rewrite.corpus import Exchange

THEMES = [
    ("dieting", "unhealthy food", "a food journal"),
    ("smoking", "cigarettes", "nicotine patches"),
    ("drinking", "alcohol", "a support group"),
    ("exercise", "my routine", "short daily walks"),
    ("sleep", "late nights", "a fixed bedtime"),
    ("stress", "my workload", "short breaks"),
    ("snacking", "sugary snacks", "planned meals"),
    ("work", "long shifts", "a lighter schedule"),
    ("therapy", "my sessions", "weekly check-ins"),
    ("family", "my mother", "honest conversations"),
    ("weight", "the scale", "smaller portions"),
    ("anxiety", "racing thoughts", "breathing exercises"),
    ("medication", "the side effects", "a new prescription"),
    ("spending", "impulse purchases", "a weekly budget"),
    ("anger", "sudden outbursts", "counting to ten"),
    ("focus", "constant distractions", "a quiet desk"),
    ("grief", "the loss", "a memory journal"),
    ("pain", "my back", "gentle stretching"),
]

FEELINGS = ["stuck", "worried", "exhausted", "defeated", "overwhelmed", "frustrated"]
TIMES = ["for months", "since last year", "all winter", "for weeks", "since the diagnosis"]

PROMPT_PATTERNS = [
    "I have been struggling with {topic} {time} and I feel {feeling} because {object} keeps getting in the way.",
    "My {topic} has been out of control {time} and honestly I feel {feeling} about {object} every single day.",
    "I keep fighting with {topic} {time} but {object} always wins and that leaves me feeling {feeling}.",
    "Ever since I started dealing with {topic} {time} I have felt {feeling} and {object} makes it worse.",
    "People tell me my {topic} is a choice but {time} now {object} has made me feel {feeling}.",
    "I want to change my {topic} and I have tried {time} but {object} leaves me feeling {feeling}.",
]

# one marker family per level; kept disjoint on purpose. NR leans on
# advice/question phrasing and stays content-light, while reflections
# mirror the client's topic words, so frequency-ratio masking has real
# structure to find.
NR_PATTERNS = [
    "Try to cut back on {object} a little this week.",
    "Why don't we set up a simple plan to follow?",
    "Have you thought about setting a small goal for {topic}?",
    "You should just take it one day at a time.",
    "Start with small steps and keep the evenings busy.",
    "Have you considered asking someone for help?",
]
SR_PATTERNS = [
    "It sounds like you feel {feeling} about {topic} because {object} keeps winning. You have been carrying that weight {time} and it wears on you.",
    "You feel {feeling} because {object} has been running your {topic} {time}. Every day it takes a little more of the energy you want for other things.",
    "It sounds like {topic} has been hard {time} and {object} is a big part of that. You keep showing up anyway and it still leaves you {feeling}.",
    "You are saying that {object} leaves you {feeling} and your {topic} pays the price. The harder you push against it the more it pushes back at you.",
]
CR_PATTERNS = [
    "Part of you is worried that {topic} will never change no matter how hard you fight {object}. The fight itself has started to feel like the only thing you can count on.",
    "Underneath it all you are worried that {object} has more power over your {topic} than you do. That worry makes every small setback with {object} feel like proof.",
    "You are worried that giving up {object} means losing the one thing that helps you cope with {topic}. Letting go of it feels less like freedom and more like falling.",
    "Part of you wants to change {topic} and another part is afraid of what life without {object} asks of you. Both parts are telling you something that matters.",
    "Deep down you are worried that {topic} and {object} say something about who you are. The {feeling} feeling grows from that worry more than from the habit itself.",
]

NR_BEHAVIORS = ["question", "advice", "therapist input", "other"]

# Ambiguous items hedge instead of quoting an NR pattern outright, so the
# clean marker families stay disjoint across labels even after coin flips.
AMBIGUOUS_JOINERS = {
    ("NR", "SR"): (
        "Maybe you could ease up on {object} for a while. It sounds like you feel {feeling} about it.",
        "Perhaps cutting down on {object} is worth a try. You feel {feeling} about it most days.",
        "One option might be taking a break from {object}. It sounds like that leaves you {feeling}.",
        "You could maybe go easier on yourself about {topic}. You feel {feeling} when it comes up.",
        "It might help to slow down with {object}. It sounds like you feel {feeling} about that.",
        "Perhaps a fresh start with {topic} is worth considering. You feel {feeling} about where things stand.",
    ),
    ("CR", "NR"): (
        "One option might be stepping back from {object} for a bit. Part of you is worried about it too.",
        "Maybe you could look at {topic} from another angle. Part of you is worried it will not change.",
        "Perhaps easing off {object} is worth a try. Underneath it all you are worried about losing control.",
        "It might help to talk {topic} over with someone. Part of you is worried what they would think.",
        "You could maybe give yourself some credit here. Deep down you are worried that {topic} defines you.",
        "Perhaps a short break from {object} would help. Part of you is worried the break would not last.",
    ),
    ("CR", "SR"): (
        "You feel {feeling} about {topic}. Part of you is worried it will never change.",
        "It sounds like {object} leaves you {feeling}. Deep down you are worried it has the upper hand.",
        "You feel {feeling} when {object} wins. Part of you is worried that winning is all it does.",
        "It sounds like {topic} has worn you down. Underneath it all you are worried about what comes next.",
        "You are saying {object} leaves you {feeling}. Part of you is worried there is no way around it.",
        "It sounds like you feel {feeling} about {topic}. Part of you is worried it says something about you.",
    ),
}


def _fill(pattern: str, slots: dict) -> str:
    return pattern.format(**slots)


def generate_pair_corpus(
    n_groups: int = 400,
    seed: int = 0,
    ambiguous_rate: float = 0.35,
) -> list[Exchange]:
    """Synthetic PAIR-style corpus; each group shares one unique prompt.

    ambiguous_rate is applied per NR/SR slot, not per group; the group's
    complex reflection always stays cleanly marked so reference lookups
    land on a real reflection.
    """
    rng = random.Random(seed)
    out: list[Exchange] = []
    n_prompts = len(PROMPT_PATTERNS)
    n_themes = len(THEMES)
    n_times = len(TIMES)
    n_feel = len(FEELINGS)
    if n_groups > n_prompts * n_themes * n_times * n_feel:
        raise ValueError("not enough slot combinations for unique prompts")

    for g in range(n_groups):
        # mixed-radix walk keeps every prompt string unique
        idx = g
        p_i = idx % n_prompts
        idx //= n_prompts
        t_i = idx % n_themes
        idx //= n_themes
        ti_i = idx % n_times
        idx //= n_times
        f_i = idx % n_feel
        topic, obj, alt = THEMES[t_i]
        slots = {
            "topic": topic,
            "object": obj,
            "alt": alt,
            "time": TIMES[ti_i],
            "feeling": FEELINGS[f_i],
        }
        prompt = _fill(PROMPT_PATTERNS[p_i], slots)

        def emit(response, label, behavior=None):
            out.append(
                Exchange(
                    id=f"pair-{g:04d}-{len(out)}",
                    dataset="PAIR",
                    prompt=prompt,
                    response=response,
                    reflection_label=label,
                    behavior_label=behavior,
                )
            )

        def maybe_ambiguous(label, response, behavior=None):
            if rng.random() < ambiguous_rate:
                other = rng.choice([l for l in ("NR", "SR", "CR") if l != label])
                key = tuple(sorted((label, other)))
                text = _fill(rng.choice(AMBIGUOUS_JOINERS[key]), slots)
                emit(text, rng.choice(key), behavior)
            else:
                emit(response, label, behavior)

        emit(_fill(rng.choice(CR_PATTERNS), slots), "CR")
        if rng.random() < 0.5:
            maybe_ambiguous("SR", _fill(rng.choice(SR_PATTERNS), slots))
        for _ in range(rng.randint(1, 3)):
            maybe_ambiguous(
                "NR",
                _fill(rng.choice(NR_PATTERNS), slots),
                rng.choice(NR_BEHAVIORS),
            )
    return out


def generate_annomi_turns(
    n: int = 150, seed: int = 1
) -> list[tuple[str, str, str]]:
    """Raw client/counselor turn pairs, including ones the filter should drop."""
    rng = random.Random(seed)
    turns: list[tuple[str, str, str]] = []
    for i in range(n):
        topic, obj, alt = THEMES[i % len(THEMES)]
        slots = {
            "topic": topic,
            "object": obj,
            "alt": alt,
            "time": rng.choice(TIMES),
            "feeling": rng.choice(FEELINGS),
        }
        client = _fill(rng.choice(PROMPT_PATTERNS), slots)
        roll = rng.random()
        if roll < 0.08:
            client = "- " + client
        elif roll < 0.16:
            client = "um " + " ".join(client.split()[:12])
        elif roll < 0.22:
            turns.append((client, "I see.", "question"))
            continue
        behavior = rng.choice(NR_BEHAVIORS + ["reflection"])
        if behavior == "reflection":
            counselor = _fill(rng.choice(SR_PATTERNS), slots)
        else:
            counselor = _fill(rng.choice(NR_PATTERNS), slots)
        turns.append((client, counselor, behavior))
    return turns


def reference_map(exchanges: list[Exchange]) -> dict[str, str]:
    """Earliest complex reflection per prompt, for reference-based scoring."""
    refs: dict[str, str] = {}
    for ex in exchanges:
        if ex.reflection_label == "CR" and ex.prompt not in refs:
            refs[ex.prompt] = ex.response
    return refs
