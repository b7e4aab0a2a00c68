"""Coarse part-of-speech tagging behind a swappable interface.

Keyphrase extraction only needs to find noun/adjective runs, so the
default tagger is a lexicon plus suffix heuristics. Anything callable
with the same signature (tokens -> coarse tags) can replace it through
configuration.
"""

from __future__ import annotations

NOUN = "NOUN"
ADJ = "ADJ"
VERB = "VERB"
ADV = "ADV"
FUNC = "FUNC"
PUNCT = "PUNCT"
NUM = "NUM"

_DETS = {"a", "an", "the", "this", "that", "these", "those", "some", "any",
         "no", "every", "each", "all", "both"}
_PRONOUNS = {"i", "you", "he", "she", "it", "we", "they", "me", "him", "her",
             "us", "them", "my", "your", "his", "its", "our", "their", "mine",
             "yours", "myself", "yourself", "himself", "herself", "itself",
             "ourselves", "themselves", "who", "whom", "whose", "what",
             "which", "something", "anything", "everything", "nothing",
             "someone", "anyone", "everyone"}
_ADPOSITIONS = {"of", "in", "on", "at", "by", "for", "with", "about", "into",
                "over", "under", "after", "before", "between", "through",
                "during", "against", "around", "toward", "towards", "from",
                "to", "up", "down", "off", "out", "near"}
_CONJ = {"and", "or", "but", "because", "so", "if", "when", "while", "than",
         "as", "though", "although", "unless", "since", "whether"}
_AUX_VERBS = {"be", "am", "is", "are", "was", "were", "been", "being", "do",
              "does", "did", "done", "have", "has", "had", "having", "will",
              "would", "can", "could", "shall", "should", "may", "might",
              "must", "won't", "don't", "doesn't", "didn't", "can't",
              "couldn't", "shouldn't", "wouldn't", "isn't", "aren't",
              "wasn't", "weren't", "haven't", "hasn't", "hadn't", "not"}
_COMMON_VERBS = {"feel", "feels", "felt", "sound", "sounds", "sounded",
                 "seem", "seems", "seemed", "keep", "keeps", "kept", "want",
                 "wants", "wanted", "know", "knows", "knew", "known", "think",
                 "thinks", "thought", "say", "says", "said", "go", "goes",
                 "went", "gone", "get", "gets", "got", "make", "makes",
                 "made", "try", "tries", "tried", "give", "gives", "gave",
                 "given", "take", "takes", "took", "taken", "work", "works",
                 "worked", "die", "dies", "died", "help", "helps", "helped",
                 "talk", "talks", "talked", "tell", "tells", "told", "come",
                 "comes", "came", "look", "looks", "looked", "hear", "hears",
                 "heard", "let", "lets", "start", "starts", "started",
                 "stop", "stops", "stopped", "quit", "quits", "stay",
                 "stays", "stayed", "matter", "matters", "mattered",
                 "believe", "believes", "believed", "wish", "wishes",
                 "wished", "hope", "hopes", "hoped", "searching", "giving",
                 "getting", "going", "gaining", "losing", "trying",
                 "wrestling", "struggling", "looking"}
_COMMON_ADVERBS = {"very", "really", "never", "always", "often", "maybe",
                   "perhaps", "again", "too", "also", "still", "yet", "now",
                   "then", "here", "there", "just", "even", "only", "quite",
                   "back", "away", "enough", "together", "lately", "anymore"}
# Domain nominals that suffix rules would otherwise misread as verbs.
_NOUN_LEXICON = {"dieting", "eating", "smoking", "drinking", "snacking",
                 "feeling", "feelings", "morning", "evening", "nothing",
                 "meeting", "training", "craving", "cravings", "marriage",
                 "mother", "father", "family", "cancer", "food", "foods",
                 "weight", "work", "job", "sleep", "stress", "health",
                 "doctor", "exercise", "routine", "habit", "habits", "diet",
                 "change", "changes", "way", "ways", "thing", "things",
                 "time", "times", "day", "days", "week", "weeks", "year",
                 "years", "life", "part", "people", "kids", "children",
                 "house", "home", "money", "experience", "past", "future",
                 "pressure", "breast", "yoga", "journal", "schedule",
                 "walk", "walks", "plan", "goal", "goals", "counselor",
                 "therapy", "drinks", "alcohol", "cigarettes", "budget",
                 "debt", "divorce", "argument", "arguments"}
_ADJ_LEXICON = {"stuck", "anxious", "ashamed", "overwhelmed", "hopeless",
                "frustrated", "exhausted", "worried", "guilty", "angry",
                "lonely", "restless", "discouraged", "unhealthy", "healthy",
                "difficult", "hard", "tough", "tired", "afraid", "scared",
                "sad", "upset", "nervous", "unhappy", "happy", "bad",
                "good", "big", "bigger", "small", "new", "old", "own",
                "same", "last", "late", "heavy", "devastating", "sure",
                "unsure", "trapped", "concerned", "uneasy", "embarrassed",
                "swamped", "defeated", "exasperated", "drained",
                "disheartened", "remorseful", "isolated", "unsettled",
                "worn", "burned"}

_ADJ_SUFFIXES = ("ful", "less", "ous", "ive", "able", "ible", "ish", "al",
                 "ic", "est")
_NOUN_SUFFIXES = ("ness", "tion", "sion", "ment", "ity", "ance", "ence",
                  "ism", "ship", "hood", "er", "or", "ist")


def tag_token(token: str) -> str:
    low = token.lower()
    if not any(ch.isalpha() for ch in low):
        return NUM if any(ch.isdigit() for ch in low) else PUNCT
    if low in _NOUN_LEXICON:
        return NOUN
    if low in _ADJ_LEXICON:
        return ADJ
    if low in _DETS or low in _PRONOUNS or low in _ADPOSITIONS or low in _CONJ:
        return FUNC
    if low in _AUX_VERBS:
        return FUNC
    if low in _COMMON_VERBS:
        return VERB
    if low in _COMMON_ADVERBS:
        return ADV
    if low.endswith("ly") and len(low) > 3:
        return ADV
    for suf in _ADJ_SUFFIXES:
        if low.endswith(suf) and len(low) > len(suf) + 2:
            return ADJ
    for suf in _NOUN_SUFFIXES:
        if low.endswith(suf) and len(low) > len(suf) + 2:
            return NOUN
    if low.endswith(("ing", "ed")) and len(low) > 4:
        return VERB
    # unknown open-class words read best as nouns for candidate mining
    return NOUN


class RuleTagger:
    """Default tagger: lexicon lookups with suffix fallbacks."""

    def __call__(self, tokens: list[str]) -> list[str]:
        return [tag_token(t) for t in tokens]


DEFAULT_TAGGER = RuleTagger()
