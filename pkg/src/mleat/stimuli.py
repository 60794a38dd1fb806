"""Stimulus word lists for the ten classic WEAT tests, plus a HistWords variant.

Lists are kept verbatim (order and case) so permutation enumeration and
checksums are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .embeddings import Role, StimulusGroupSpec


def _words(s: str) -> tuple[str, ...]:
    return tuple(w.strip() for w in s.split(","))


PLEASANT = _words(
    "caress, freedom, health, love, peace, cheer, friend, heaven, loyal, pleasure, diamond, gentle, honest, lucky, rainbow, diploma, gift, honor, miracle, sunrise, family, happy, laughter, paradise, vacation"
)

UNPLEASANT = _words(
    "abuse, crash, filth, murder, sickness, accident, death, grief, poison, stink, assault, disaster, hatred, pollute, tragedy, divorce, jail, poverty, ugly, cancer, kill, rotten, vomit, agony, prison"
)

FLOWER = _words(
    "aster, clover, hyacinth, marigold, poppy, azalea, crocus, iris, orchid, rose, bluebell, daffodil, lilac, pansy, tulip, buttercup, daisy, lily, peony, violet, carnation, gladiola, magnolia, petunia, zinnia"
)

INSECT = _words(
    "ant, caterpillar, flea, locust, spider, bedbug, centipede, fly, maggot, tarantula, bee, cockroach, gnat, mosquito, termite, beetle, cricket, hornet, moth, wasp, blackfly, dragonfly, horsefly, roach, weevil"
)

INSTRUMENT = _words(
    "bagpipe, cello, guitar, lute, trombone, banjo, clarinet, harmonica, mandolin, trumpet, bassoon, drum, harp, oboe, tuba, bell, fiddle, harpsichord, piano, viola, bongo, flute, horn, saxophone, violin"
)

WEAPON = _words(
    "arrow, club, gun, missile, spear, axe, dagger, harpoon, pistol, sword, blade, dynamite, hatchet, rifle, tank, bomb, firearm, knife, shotgun, teargas, cannon, grenade, mace, slingshot, whip"
)

UNPLEASANT_ALT = _words(
    "abuse, crash, filth, murder, sickness, accident, death, grief, poison, stink, assault, disaster, hatred, pollute, tragedy, divorce, jail, poverty, ugly, cancer, kill, rotten, vomit, bomb, evil"
)

EUROPEAN_AMERICAN = _words(
    "Adam, Harry, Josh, Roger, Alan, Frank, Justin, Ryan, Andrew, Jack, Matthew, Stephen, Brad, Greg, Paul, Jonathan, Peter, Amanda, Courtney, Heather, Melanie, Katie, Betsy, Kristin, Nancy, Stephanie, Ellen, Lauren, Colleen, Emily, Megan, Rachel"
)

AFRICAN_AMERICAN = _words(
    "Alonzo, Jamel, Theo, Alphonse, Jerome, Leroy, Torrance, Darnell, Lamar, Lionel, Tyree, Deion, Lamont, Malik, Terrence, Tyrone, Lavon, Marcellus, Wardell, Nichelle, Shereen, Ebony, Latisha, Shaniqua, Jasmine, Tanisha, Tia, Lakisha, Latoya, Yolanda, Malika, Yvette"
)

EUROPEAN_AMERICAN_2 = _words(
    "Brad, Brendan, Geoffrey, Greg, Brett, Matthew, Neil, Todd, Allison, Anne, Carrie, Emily, Jill, Laurie, Meredith, Sarah"
)

AFRICAN_AMERICAN_2 = _words(
    "Darnell, Hakim, Jermaine, Kareem, Jamal, Leroy, Rasheed, Tyrone, Aisha, Ebony, Keisha, Kenya, Lakisha, Latoya, Tamika, Tanisha"
)

PLEASANT_2 = _words(
    "joy, love, peace, wonderful, pleasure, friend, laughter, happy"
)

UNPLEASANT_2 = _words(
    "agony, terrible, horrible, nasty, evil, war, awful, failure"
)

CAREER = _words(
    "executive, management, professional, corporation, salary, office, business, career"
)

DOMESTIC = _words(
    "home, parents, children, family, cousins, marriage, wedding, relatives"
)

MALE_NAME = _words(
    "John, Paul, Mike, Kevin, Steve, Greg, Jeff, Bill"
)

FEMALE_NAME = _words(
    "Amy, Joan, Lisa, Sarah, Diana, Kate, Ann, Donna"
)

MALE_TERMS = _words(
    "male, man, boy, brother, he, him, his, son"
)

FEMALE_TERMS = _words(
    "female, woman, girl, sister, she, her, hers, daughter"
)

MATH = _words(
    "math, algebra, geometry, calculus, equations, computation, numbers, addition"
)

ART = _words(
    "poetry, art, dance, literature, novel, symphony, drama, sculpture"
)

MALE_TERMS_2 = _words(
    "brother, father, uncle, grandfather, son, he, his, him"
)

FEMALE_TERMS_2 = _words(
    "sister, mother, aunt, grandmother, daughter, she, hers, her"
)

SCIENCE = _words(
    "science, technology, physics, chemistry, Einstein, NASA, experiment, astronomy"
)

ART_2 = _words(
    "poetry, art, Shakespeare, dance, literature, novel, symphony, drama"
)

TEMPORARY = _words(
    "impermanent, unstable, variable, fleeting, short-term, brief, occasional"
)

PERMANENT = _words(
    "stable, always, constant, persistent, chronic, prolonged, forever"
)

MENTAL = _words(
    "sad, hopeless, gloomy, tearful, miserable, depressed"
)

PHYSICAL = _words(
    "sick, illness, influenza, disease, virus, cancer"
)

YOUNG = _words(
    "Tiffany, Michelle, Cindy, Kristy, Brad, Eric, Joey, Billy"
)

OLD = _words(
    "Ethel, Bernice, Gertrude, Agnes, Cecil, Wilbert, Mortimer, Edgar"
)
MATH_HISTWORDS = tuple({"math": "mathematics", "calculus": "calculation"}.get(w, w) for w in MATH)
ART_HISTWORDS = tuple("music" if w == "symphony" else w for w in ART)


@dataclass(frozen=True)
class BuiltinTest:
    name: str
    title: str
    X: tuple[str, str, tuple[str, ...]]
    Y: tuple[str, str, tuple[str, ...]]
    A: tuple[str, str, tuple[str, ...]]
    B: tuple[str, str, tuple[str, ...]]

    def groups(self) -> dict[str, StimulusGroupSpec]:
        """Group specs keyed by role letter, named ``<test>:<concept>``."""
        roles = {"X": Role.TARGET_X, "Y": Role.TARGET_Y, "A": Role.ATTRIBUTE_A, "B": Role.ATTRIBUTE_B}
        out = {}
        for letter, role in roles.items():
            _, concept, words = getattr(self, letter)
            out[letter] = StimulusGroupSpec(f"{self.name}:{concept}", role, tokens=words)
        return out

    def sizes(self) -> tuple[int, int, int, int]:
        return tuple(len(getattr(self, r)[2]) for r in "XYAB")

    def to_dict(self) -> dict:
        return {"name": self.name, "title": self.title,
                **{r: {"concept": getattr(self, r)[1], "tokens": list(getattr(self, r)[2])} for r in "XYAB"}}


def _t(name, title, x, y, a, b) -> BuiltinTest:
    return BuiltinTest(name, title, ("X", *x), ("Y", *y), ("A", *a), ("B", *b))


BUILTIN_TESTS: dict[str, BuiltinTest] = {t.name: t for t in (
    _t("flower-insect-pu25", "Flower/Insect P/U25",
       ("Flower", FLOWER), ("Insect", INSECT), ("Pleasant", PLEASANT), ("Unpleasant", UNPLEASANT)),
    _t("instrument-weapon-pu25", "Instrument/Weapon P/U25",
       ("Instrument", INSTRUMENT), ("Weapon", WEAPON), ("Pleasant", PLEASANT), ("Unpleasant", UNPLEASANT)),
    _t("eaaa32-pu25", "EA/AA32 P/U25",
       ("European American", EUROPEAN_AMERICAN), ("African American", AFRICAN_AMERICAN),
       ("Pleasant", PLEASANT), ("Unpleasant - Alt", UNPLEASANT_ALT)),
    _t("eaaa16-pu25", "EA/AA16 P/U25",
       ("European American 2", EUROPEAN_AMERICAN_2), ("African American 2", AFRICAN_AMERICAN_2),
       ("Pleasant", PLEASANT), ("Unpleasant - Alt", UNPLEASANT_ALT)),
    _t("eaaa16-pu8", "EA/AA16 P/U8",
       ("European American 2", EUROPEAN_AMERICAN_2), ("African American 2", AFRICAN_AMERICAN_2),
       ("Pleasant 2", PLEASANT_2), ("Unpleasant 2", UNPLEASANT_2)),
    _t("male-female-career-family", "Male/Female Career/Family",
       ("Male Name", MALE_NAME), ("Female Name", FEMALE_NAME), ("Career", CAREER), ("Domestic", DOMESTIC)),
    _t("math-arts-male-female", "Math/Arts Male/Female",
       ("Math", MATH), ("Art", ART), ("Male Terms", MALE_TERMS), ("Female Terms", FEMALE_TERMS)),
    _t("science-arts-male-female", "Science/Arts Male/Female",
       ("Science", SCIENCE), ("Art 2", ART_2), ("Male Terms 2", MALE_TERMS_2), ("Female Terms 2", FEMALE_TERMS_2)),
    _t("mental-physical-tempperm", "Mental/Physical Temp/Perm",
       ("Mental", MENTAL), ("Physical", PHYSICAL), ("Temporary", TEMPORARY), ("Permanent", PERMANENT)),
    _t("young-old-pu8", "Young/Old P/U8",
       ("Young", YOUNG), ("Old", OLD), ("Pleasant 2", PLEASANT_2), ("Unpleasant 2", UNPLEASANT_2)),
    _t("math-arts-histwords", "Math/Arts Male/Female (HistWords)",
       ("Math", MATH_HISTWORDS), ("Art", ART_HISTWORDS), ("Male Terms", MALE_TERMS), ("Female Terms", FEMALE_TERMS)),
)}

# the ten tests of the GloVe reproduction, in table order
CLASSIC10 = tuple(list(BUILTIN_TESTS)[:10])


def list_builtin_stimuli() -> dict[str, BuiltinTest]:
    return dict(BUILTIN_TESTS)


def get_builtin(name: str) -> BuiltinTest:
    try:
        return BUILTIN_TESTS[name]
    except KeyError:
        raise KeyError(f"unknown built-in test {name!r}; known: {', '.join(BUILTIN_TESTS)}") from None
