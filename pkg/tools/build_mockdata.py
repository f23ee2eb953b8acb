"""Regenerate the mock backend's bundled data.

Writes src/gecforge/mockdata/{subjects.tsv,exemplars.tsv}. Every exemplar is
checked against the analyzer with every subject: the pair must annotate to
exactly one edit of the exemplar's category, otherwise the script fails.

    python tools/build_mockdata.py
"""

from __future__ import annotations

import sys
from pathlib import Path

from gecforge.analyzer import annotate, load_lexicon
from gecforge.analyzer.lexicon import comparative, past_regular, superlative, third_person
from gecforge.core import NON_DIVERSIFIED, SentencePair, SubjectType, parse_category

OUT = Path(__file__).resolve().parents[1] / "src" / "gecforge" / "mockdata"

SUBJECTS = {
    SubjectType.COMMON_NOUN: "car dog teacher city book bird house doctor river computer farmer phone "
    "garden student cat boat tree baker clock village bicycle nurse kitten train lamp pilot "
    "school bridge market painter window island camera engineer horse rabbit author chef road",
    SubjectType.PROPER_NOUN: "Maria John Tokyo London Amazon Everest Sarah Picasso Egypt Canada "
    "Berlin Mumbai Oliver Emma Lisbon Nairobi Kenji Sofia Chicago Peru Daniel Olivia Toronto "
    "Vienna Lucas Hannah Mexico Norway Madrid Seoul Ahmed Chloe Boston Lagos Oslo Rome Ethan Mia "
    "Sydney Cairo",
    SubjectType.COLLECTIVE_NOUN: "team family committee band crew class audience jury army crowd "
    "herd flock orchestra staff council panel choir gang troop fleet club board company "
    "government nation group tribe squad faculty navy union pack swarm colony cast community "
    "population congregation delegation party",
    SubjectType.COMPOUND_NOUN: "fire_truck toothbrush sunflower bookstore mailbox football notebook "
    "rainbow bus_driver coffee_shop post_office train_station headphone skateboard sailboat "
    "raincoat doorbell cupboard grandmother firefighter airport bedroom seashell snowman "
    "spaceship watermelon lighthouse butterfly motorcycle sunscreen toothpaste playground "
    "haircut teapot backpack keyboard fireplace newspaper classroom workshop",
    SubjectType.CONCRETE_NOUN: "car table stone apple chair bottle hammer pencil guitar bucket "
    "ladder blanket candle mirror pillow rope shoe spoon tent wallet bell coin drum feather "
    "glove helmet jacket kettle knife lantern magnet needle piano plate ring saddle sock "
    "tractor violin whistle",
    SubjectType.ABSTRACT_NOUN: "happiness freedom courage love honesty wisdom justice friendship "
    "knowledge beauty patience curiosity anger fear hope kindness loyalty peace pride "
    "trust truth faith grief joy luck mercy silence success talent humor charity comfort "
    "dignity energy fame glory harmony idea memory mystery",
    SubjectType.COUNTABLE_NOUN: "apple chair book pen cup ball hat coin map toy ticket bag key "
    "egg bottle box shirt card letter cookie flower candle spoon basket ring plate umbrella "
    "photo shoe brush glass onion carrot peach banana lemon pillow blanket ladder envelope",
    SubjectType.UNCOUNTABLE_NOUN: "water rice sand milk music furniture information advice "
    "luggage equipment money traffic weather homework bread cheese butter sugar salt flour "
    "oil gold silver wool paper coffee tea juice snow rain smoke steam air soil grass "
    "electricity knowledge news research",
}

VERBS = (
    "swim run walk play read write sing drive jump work cook dance travel sleep study teach "
    "climb paint laugh listen smile wait fly grow speak think watch wash fix visit"
).split()
IRREGULAR_3SG_PAST = {
    "swim": "swam", "run": "ran", "read": "read", "write": "wrote", "sing": "sang", "drive": "drove",
    "sleep": "slept", "teach": "taught", "fly": "flew", "grow": "grew", "speak": "spoke",
    "think": "thought",
}
ING = {
    "swim": "swimming", "run": "running", "drive": "driving", "write": "writing", "dance": "dancing",
    "smile": "smiling", "travel": "traveling", "study": "studying",
}


def _ing(v: str) -> str:
    if v in ING:
        return ING[v]
    return v[:-1] + "ing" if v.endswith("e") else v + "ing"


def exemplars() -> list[tuple[str, str, str, str]]:
    rows: list[tuple[str, str, str, str]] = []

    def add(cat, pattern, wrong, right):
        rows.append((cat, pattern or "", wrong, right))

    for v in VERBS:
        add("VERB:SVA", v, f"{v} every morning.", f"{third_person(v)} every morning.")
        past = IRREGULAR_3SG_PAST.get(v) or past_regular(v)
        if past != v:
            add("VERB:TENSE", v, f"{v} after lunch yesterday.", f"{past} after lunch yesterday.")
        add("VERB:FORM", v, f"can {_ing(v)} very well.", f"can {v} very well.")

    for w, r, rest in [
        ("swims", "drives", "to the shore"), ("reads", "writes", "a letter"), ("eats", "drinks", "the juice"),
        ("hears", "sees", "the mountain"), ("sells", "buys", "a new coat"), ("forgets", "remembers", "the answer"),
        ("loses", "finds", "the map"), ("closes", "opens", "the window"), ("hates", "loves", "the music"),
        ("borrows", "lends", "money to friends"), ("pushes", "pulls", "the heavy cart"),
        ("sends", "receives", "a parcel"), ("teaches", "learns", "a new song"), ("sits", "stands", "near the door"),
        ("sleeps", "wakes", "at dawn"), ("ignores", "answers", "the phone"), ("leaves", "enters", "the room"),
        ("breaks", "repairs", "the fence"), ("hides", "shows", "the photo"), ("cries", "laughs", "at the joke"),
        ("throws", "catches", "the ball"), ("spends", "saves", "money"),
    ]:
        add("VERB", r, f"{w} {rest}.", f"{r} {rest}.")

    for w, r in [
        ("key", "lock"), ("spoon", "fork"), ("shirt", "sweater"), ("piano", "violin"), ("carpet", "curtain"),
        ("bicycle", "motorcycle"), ("pencil", "notebook"), ("teapot", "kettle"), ("lamp", "candle"),
        ("wallet", "passport"), ("apple", "banana"), ("onion", "carrot"), ("doctor", "dentist"),
        ("sofa", "mattress"), ("ladder", "bucket"), ("blanket", "pillow"), ("umbrella", "raincoat"),
        ("violin", "trumpet"), ("camera", "telescope"), ("hammer", "screwdriver"),
    ]:
        add("NOUN", r, f"needs a new {w} today.", f"needs a new {r} today.")

    for w, r in [
        ("sad", "happy"), ("tall", "short"), ("cheap", "expensive"), ("noisy", "quiet"), ("ugly", "beautiful"),
        ("weak", "strong"), ("young", "old"), ("lazy", "busy"), ("rude", "polite"), ("brave", "nervous"),
        ("heavy", "light"), ("hungry", "thirsty"), ("rich", "poor"), ("angry", "calm"), ("bored", "excited"),
        ("strange", "normal"), ("sick", "healthy"), ("famous", "unknown"), ("proud", "humble"), ("early", "late"),
    ]:
        add("ADJ", r, f"looks {w} today.", f"looks {r} today.")

    for w, r in [
        ("never", "always"), ("seldom", "often"), ("always", "never"), ("often", "seldom"),
        ("sometimes", "usually"), ("usually", "sometimes"), ("rarely", "often"), ("already", "still"),
        ("probably", "really"), ("finally", "recently"), ("recently", "finally"), ("still", "already"),
        ("also", "only"), ("just", "almost"), ("really", "probably"), ("almost", "just"),
        ("quickly", "slowly"), ("loudly", "quietly"), ("happily", "sadly"), ("badly", "well"),
    ]:
        if w in ("quickly", "loudly", "happily", "badly"):
            add("ADV", r, f"speaks {w} at meetings.", f"speaks {r} at meetings.")
        else:
            add("ADV", r, f"{w} arrives on time.", f"{r} arrives on time.")

    for a in (
        "tall fast strong small cheap bright old young warm cold dark smart loud long short high "
        "slow soft happy busy easy heavy quiet"
    ).split():
        add("ADJ:FORM", comparative(a), f"is more {a} than before.", f"is {comparative(a)} than before.")
        add("ADJ:FORM", superlative(a), f"is the most {a} of all.", f"is the {superlative(a)} of all.")

    for w, r in [
        ("careful", "carefully"), ("quiet", "quietly"), ("slow", "slowly"), ("quick", "quickly"), ("loud", "loudly"),
        ("calm", "calmly"), ("polite", "politely"), ("brave", "bravely"), ("honest", "honestly"),
        ("patient", "patiently"), ("proud", "proudly"), ("silent", "silently"), ("smooth", "smoothly"),
        ("nervous", "nervously"), ("eager", "eagerly"), ("careless", "carelessly"), ("cheerful", "cheerfully"),
        ("graceful", "gracefully"), ("serious", "seriously"), ("perfect", "perfectly"),
    ]:
        add("MORPH", r, f"works {w} every day.", f"works {r} every day.")

    for n in (
        "apple book chair key box bag pen cup ball hat coin map lamp toy ticket brush dish card "
        "shirt letter cookie flower candle basket"
    ).split():
        from gecforge.analyzer.lexicon import plural
        add("NOUN:NUM", n, f"owns three {n}.", f"owns three {plural(n)}.")

    for o in (
        "teacher doctor farmer driver baker pilot neighbor manager student player singer painter "
        "captain king queen boss nurse author gardener tailor"
    ).split():
        add("NOUN:POSS", f"{o}'s", f"found the {o} keys.", f"found the {o}'s keys.")

    for det, noun in [
        ("an", "apple"), ("an", "orange"), ("an", "umbrella"), ("an", "envelope"), ("a", "banana"),
        ("a", "sandwich"), ("a", "ticket"), ("a", "jacket"), ("the", "window"), ("the", "door"),
        ("the", "letter"), ("the", "bottle"), ("every", "question"), ("each", "visitor"), ("another", "cookie"),
        ("this", "puzzle"), ("that", "song"), ("some", "bread"), ("no", "money"), ("much", "time"),
        ("enough", "water"), ("several", "photos"),
    ]:
        add("DET", f"{det} {noun}", f"wants {noun} now.", f"wants {det} {noun} now.")

    for adj, wrong, right, obj in [
        ("interested", "on", "in", "art"), ("afraid", "from", "of", "dogs"), ("good", "in", "at", "math"),
        ("proud", "for", "of", "the result"), ("famous", "of", "for", "its food"),
        ("similar", "with", "to", "the old one"), ("different", "of", "from", "the others"),
        ("responsible", "of", "for", "the project"), ("married", "with", "to", "a doctor"),
        ("aware", "about", "of", "the problem"), ("tired", "from", "of", "waiting"), ("keen", "in", "on", "music"),
        ("angry", "on", "with", "the driver"), ("full", "with", "of", "water"), ("fond", "for", "of", "music"),
        ("capable", "in", "of", "winning"), ("jealous", "on", "of", "the winner"), ("sure", "for", "about", "it"),
        ("close", "from", "to", "the station"), ("bad", "in", "at", "chess"),
    ]:
        add("PREP", f"{adj} {right}", f"is {adj} {wrong} {obj}.", f"is {adj} {right} {obj}.")

    for verb, w, r in [
        ("gave", "he", "him"), ("told", "she", "her"), ("helped", "they", "them"), ("thanked", "we", "us"),
        ("called", "i", "me"), ("showed", "she", "her"), ("sent", "he", "him"), ("invited", "we", "us"),
        ("met", "they", "them"), ("visited", "he", "him"), ("warned", "she", "her"), ("followed", "i", "me"),
        ("hugged", "he", "him"), ("praised", "they", "them"), ("asked", "we", "us"), ("greeted", "she", "her"),
        ("paid", "they", "them"), ("taught", "i", "me"), ("found", "he", "him"), ("joined", "we", "us"),
    ]:
        add("PRON", f"{verb} {r}", f"{verb} {w.upper() if w == 'i' else w} yesterday.", f"{verb} {r} yesterday.")

    for pattern, w, r in [
        ("neither...nor", "is neither fast or cheap.", "is neither fast nor cheap."),
        ("either...or", "is either lost nor stolen.", "is either lost or stolen."),
        ("both...and", "is both smart or kind.", "is both smart and kind."),
        ("not only...but", "is not only fast and also safe.", "is not only fast but also safe."),
        ("because", "stayed inside but it was raining.", "stayed inside because it was raining."),
        ("although", "went out because it was raining.", "went out although it was raining."),
        ("unless", "will fail if it works harder.", "will fail unless it works harder."),
        ("while", "waited outside whether the shop was closed.", "waited outside while the shop was closed."),
        ("whether", "asked if or not the bus was late.", "asked whether or not the bus was late."),
        ("so", "was tired because it went to bed.", "was tired so it went to bed."),
        ("but", "is small so very strong.", "is small but very strong."),
        ("than", "is taller as the tower.", "is taller than the tower."),
        ("yet", "was tired and yet and it kept going.", "was tired and yet it kept going."),
        ("whereas", "likes tea if the others like coffee.", "likes tea whereas the others like coffee."),
        ("once", "will rest whether the work is done.", "will rest once the work is done."),
        ("when", "smiles although the sun rises.", "smiles when the sun rises."),
        ("though", "stayed calm because the storm was loud.", "stayed calm though the storm was loud."),
        ("whenever", "sings although it feels happy.", "sings whenever it feels happy."),
        ("as...as", "is as tall than the tree.", "is as tall as the tree."),
        ("nor", "did not call and did it write.", "did not call nor did it write."),
    ]:
        add("CONJ", pattern, w, r)

    for verb, w, r, obj in [
        ("gave", "out", "up", "the plan"), ("turned", "on", "off", "the light"), ("looked", "in", "up", "the word"),
        ("put", "on", "down", "the bag"), ("took", "in", "out", "the trash"), ("threw", "in", "away", "the box"),
        ("called", "in", "off", "the meeting"), ("set", "in", "up", "the tent"), ("wrote", "in", "down", "the number"),
        ("picked", "on", "up", "the phone"), ("cut", "in", "down", "the tree"), ("filled", "in", "out", "the form"),
        ("handed", "on", "out", "the papers"), ("put", "in", "away", "the toys"), ("shut", "on", "off", "the radio"),
        ("brought", "in", "back", "the books"), ("paid", "on", "back", "the loan"), ("tore", "in", "down", "the wall"),
        ("backed", "in", "up", "the files"), ("cleaned", "on", "up", "the mess"),
    ]:
        add("PART", f"{verb} {r}", f"{verb} {w} {obj}.", f"{verb} {r} {obj}.")

    for a, conj, b in [
        ("arrived late", "but", "nobody noticed"), ("was hungry", "so", "it ate early"),
        ("tried hard", "yet", "it failed"), ("looked around", "and", "nobody was there"),
        ("waited", "but", "the bus never came"), ("felt cold", "so", "it wore a coat"),
        ("knocked twice", "but", "nobody answered"), ("studied hard", "and", "the exam went well"),
        ("ran fast", "yet", "the train left"), ("called home", "but", "the line was busy"),
        ("stayed late", "so", "the work was finished"), ("smiled", "and", "the crowd cheered"),
        ("was tired", "but", "it kept going"), ("woke early", "so", "it saw the sunrise"),
        ("searched everywhere", "yet", "the key was lost"), ("sang loudly", "and", "everyone joined"),
        ("practiced daily", "so", "the show was perfect"), ("asked nicely", "but", "the answer was no"),
        ("moved quickly", "and", "the door closed"), ("spoke softly", "yet", "everyone heard"),
    ]:
        last = a.split()[-1]
        add("PUNCT", f'comma in "{last}, {conj}"', f"{a} {conj} {b}.", f"{a}, {conj} {b}.")

    # non-diversified categories carry no pattern
    for w, r in [
        ("visited paris last summer.", "visited Paris last summer."), ("met john at the park.", "met John at the park."),
        ("speaks english very well.", "speaks English very well."), ("arrived on monday morning.", "arrived on Monday morning."),
        ("left in january.", "left in January."), ("loves french food.", "loves French food."),
        ("traveled to africa once.", "traveled to Africa once."), ("is a well known figure.", "is a well-known figure."),
        ("waited for christmas eagerly.", "waited for Christmas eagerly."), ("called mary yesterday.", "called Mary yesterday."),
        ("went to london by train.", "went to London by train."), ("rests every friday.", "rests every Friday."),
    ]:
        add("ORTH", None, w, r)
    for w, r in [
        ("doesnt like rain.", "doesn't like rain."), ("isnt ready yet.", "isn't ready yet."),
        ("wasnt at home.", "wasn't at home."), ("cant swim at all.", "can't swim at all."),
        ("didnt call back.", "didn't call back."), ("hasnt arrived yet.", "hasn't arrived yet."),
        ("wont stop now.", "won't stop now."), ("shouldnt wait long.", "shouldn't wait long."),
        ("couldnt sleep well.", "couldn't sleep well."), ("wouldnt say a word.", "wouldn't say a word."),
    ]:
        add("CONTR", None, w, r)
    for w, r in [
        ("has two childs.", "has two children."), ("saw three mouses.", "saw three mice."),
        ("needs more informations.", "needs more information."), ("bought new furnitures.", "bought new furniture."),
        ("gave good advices.", "gave good advice."), ("has sore foots.", "has sore feet."),
        ("counted five sheeps.", "counted five sheep."), ("saw many gooses.", "saw many geese."),
        ("brushes its tooths daily.", "brushes its teeth daily."), ("met two womans.", "met two women."),
        ("carried heavy luggages.", "carried heavy luggage."), ("lost some equipments.", "lost some equipment."),
    ]:
        add("NOUN:INFL", None, w, r)
    for w, r in [
        ("writed a letter.", "wrote a letter."), ("runned home.", "ran home."), ("buyed a car.", "bought a car."),
        ("goed to school.", "went to school."), ("catched the ball.", "caught the ball."),
        ("teached the class.", "taught the class."), ("thinked hard.", "thought hard."), ("eated lunch.", "ate lunch."),
        ("drinked the tea.", "drank the tea."), ("swimmed across.", "swam across."), ("bringed a gift.", "brought a gift."),
        ("sleeped late.", "slept late."), ("speaked loudly.", "spoke loudly."), ("flied away.", "flew away."),
    ]:
        add("VERB:INFL", None, w, r)
    for w, r in [
        ("always is late.", "is always late."), ("often is busy.", "is often busy."), ("never was angry.", "was never angry."),
        ("ate quickly the apple.", "ate the apple quickly."), ("read carefully the note.", "read the note carefully."),
        ("usually is calm.", "is usually calm."), ("sometimes is noisy.", "is sometimes noisy."),
        ("opened slowly the door.", "opened the door slowly."), ("speaks well English.", "speaks English well."),
        ("likes very much tea.", "likes tea very much."),
    ]:
        add("WO", None, w, r)
    for mis, fix in [
        ("recieved", "received"), ("beleived", "believed"), ("definately", "definitely"), ("seperated", "separated"),
        ("wierd", "weird"), ("untill", "until"), ("tommorow", "tomorrow"), ("goverment", "government"),
        ("enviroment", "environment"), ("begining", "beginning"),
    ]:
        add("SPELL", None, f"wrote {mis} on the board.", f"wrote {fix} on the board.")
    return rows


def noun_phrase(subject: str, subject_type: SubjectType) -> str:
    return subject if subject_type is SubjectType.PROPER_NOUN else f"The {subject}"


def main() -> int:
    lex = load_lexicon()
    subjects = {t: [s.replace("_", " ") for s in words.split()] for t, words in SUBJECTS.items()}
    rows = exemplars()
    bad = []
    for cat, pattern, w, r in rows:
        category = parse_category(cat)
        if (category in NON_DIVERSIFIED) != (not pattern):
            bad.append(f"{cat}: pattern presence wrong for {w!r}")
        for t, names in subjects.items():
            for s in names:
                np_ = noun_phrase(s, t)
                edits = annotate(SentencePair(f"{np_} {w}", f"{np_} {r}"), lex)
                if len(edits) != 1 or edits[0].category is not category:
                    bad.append(f"{cat} {np_!r} {w!r} -> {r!r}: {[(e.start, e.end, e.replacement, e.category.label) for e in edits]}")
    if bad:
        print("\n".join(bad[:80]), file=sys.stderr)
        print(f"{len(bad)} failures", file=sys.stderr)
        return 1
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "subjects.tsv", "w", encoding="utf-8") as fh:
        fh.write("# subject_type\tsubject\n")
        for t, names in subjects.items():
            for s in names:
                fh.write(f"{t.label}\t{s}\n")
    with open(OUT / "exemplars.tsv", "w", encoding="utf-8") as fh:
        fh.write("# category\tpattern\twrong_tail\tright_tail\n")
        for row in rows:
            fh.write("\t".join(row) + "\n")
    print(f"wrote {len(rows)} exemplars, {sum(map(len, subjects.values()))} subjects")
    return 0


if __name__ == "__main__":
    sys.exit(main())
