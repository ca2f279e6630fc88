#include "sim_text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <vector>

namespace sentinel::sim::detail {

namespace {

using Pool = std::vector<std::string_view>;

// Topic 0: a recent difficult decision.
const std::array<Pool, 4> kDecisionSlots{{
    {"Last spring I had to decide whether to move back to my home town to be closer to my parents.",
     "A few months ago I was offered a job in another city and had to choose between taking it or staying put.",
     "The hardest call I made recently was whether to put our old dog to sleep.",
     "Earlier this year I had to decide if I should go back to university part time.",
     "Recently I had to pick between two flats, one cheap but far out and one close to work that cost a lot more.",
     "My partner and I had to decide whether to lend a large amount of money to a family friend.",
     "This winter I went back and forth for weeks about quitting my band.",
     "I had to choose which secondary school to send my oldest to.",
     "In January I had to decide whether to report a coworker who kept taking credit for other people's work.",
     "A while back I had to decide whether to sell my car and rely on buses and my bike."},
    {"Money was the biggest thing on my mind because rent has gone up a lot.",
     "I kept thinking about how it would affect the kids, they had only just settled in.",
     "I wrote a list of pros and cons on the back of an envelope, which helped less than I hoped.",
     "My main worry was letting people down.",
     "The commute mattered more to me than I expected.",
     "I also thought about my health since I'd been sleeping badly for months.",
     "There was the question of whether I would regret it in five years.",
     "I asked myself what I would tell a friend in the same spot.",
     "Timing was awkward because everything seemed to happen in the same month.",
     "I compared the cost with how much stress the current situation was causing me."},
    {"I talked it through with my sister over several long phone calls.",
     "In the end I slept on it for a week before saying anything.",
     "My dad gave me some blunt advice that I didn't want to hear but needed to.",
     "I went for a lot of walks, which is usually where I think best.",
     "I tried flipping a coin and noticed I was disappointed with the result, so that told me something.",
     "A colleague who had been through the same thing walked me through what happened to her.",
     "I read a few forum threads but mostly they made me more confused.",
     "We sat down at the kitchen table one evening and just stopped going back and forth.",
     "I gave myself a deadline of the end of the month.",
     "I kept a note on my phone of how I felt about it each day."},
    {"I went with the option that felt less exciting but safer.",
     "We said yes in the end and so far it has worked out fine.",
     "I turned it down, and some days I still wonder about it.",
     "I decided to stay, mostly because of the people around me.",
     "We chose the cheaper one and I don't regret it.",
     "It turned out better than I expected, though the first weeks were rough.",
     "I made the change and felt relieved almost straight away.",
     "I said no, which was hard, but it was the right call for us.",
     "I did a bit of both, which is not ideal but works for now.",
     "I ended up doing what my gut told me on the very first day."},
}};

// Topic 1: what makes a good neighbourhood.
const std::array<Pool, 4> kNeighbourhoodSlots{{
    {"For me the most important thing is feeling safe walking home after dark.",
     "I think a good neighbourhood is one where people actually know each other's names.",
     "Having a decent park within walking distance makes a huge difference.",
     "Good public transport is top of my list, since I don't drive.",
     "I grew up on a street where kids played outside until dinner and I'd love that again.",
     "Quiet matters a lot to me because I work night shifts.",
     "Affordable housing comes first, otherwise nobody can stay long enough to build a community.",
     "I like places with a mix of young families and older people.",
     "A local high street with independent shops is a big plus for me.",
     "Clean streets and working streetlights sound boring but they really matter."},
    {"Where I live now there is a small bakery on the corner and the owner remembers everyone.",
     "We have a community garden that brings people together every weekend.",
     "My old area had no bus after eight in the evening which was a nightmare.",
     "There's a library two streets away that runs free classes for kids.",
     "Our neighbours organised a street party last summer and it was lovely.",
     "A lot of people on my road help each other with small things like parcels and bins.",
     "The nearest GP is a twenty minute walk, which is too far when you're ill.",
     "Traffic on the main road makes it hard to cross with a pram.",
     "The local school is good, which is why so many families move here.",
     "There used to be a pub that everyone went to but it closed a few years ago."},
    {"It does not need to be fancy, just looked after.",
     "Too many short-term rentals make an area feel empty.",
     "Noise from late night bars can wear you down over time.",
     "When rents rise too fast people move away and you lose that feeling.",
     "Some places look nice but nobody says hello, which feels lonely.",
     "Green space is more important than I realised before I had a dog.",
     "Being close to family is probably worth more than any of this.",
     "Reliable internet should be on the list too these days.",
     "I don't mind a bit of noise if it means there's life around.",
     "A neighbourhood can change a lot in just a couple of years."},
    {"Overall it's about people more than buildings.",
     "So safety, friendliness and a bit of green is my answer.",
     "Basically somewhere you want to come home to.",
     "I think that's why I've stayed in the same area for eleven years.",
     "Those things together make me feel at home.",
     "In short, somewhere with a sense of community.",
     "That is what I'd look for if I moved again.",
     "It's the small everyday things that add up.",
     "It's hard to explain, you just feel it.",
     "Money aside, that's my idea of a good place."},
}};

const Pool kReflections{
    "Looking back, I think I overthought it.",
    "If I had to do it again I would ask for help sooner.",
    "It taught me that there is rarely a perfect option.",
    "I still think about it sometimes when I can't sleep.",
    "The decision itself took minutes, the worrying took months.",
    "I am glad it is over, to be honest.",
    "Next time I will trust myself a bit more.",
    "Not everyone agreed with me and that was fine in the end.",
    "I learned I care more about stability than I thought.",
    "It was a good reminder that most choices can be undone."};

const std::array<Pool, 2> kAgentAnswers{{
    {"One difficult decision I recently faced was whether to accept a job offer in another city. "
     "I carefully considered several factors, including financial stability, career growth, proximity "
     "to family, and overall well-being. After weighing the advantages and disadvantages, I consulted "
     "trusted friends and reflected on my long-term goals. Ultimately, I decided to accept the offer, "
     "as it aligned with my professional aspirations while still allowing me to maintain meaningful "
     "connections.",
     "A recent difficult decision involved choosing whether to relocate for a new opportunity. I "
     "evaluated the potential benefits, such as professional development and increased income, against "
     "the costs, including distance from my support network and the stress of moving. I sought advice "
     "from people I trust and took time to reflect on my priorities. In the end, I chose the option "
     "that best balanced personal fulfillment with long-term stability.",
     "I recently had to decide whether to continue my current role or pursue further education. Key "
     "considerations included financial implications, time commitment, and how each path would affect "
     "my future career prospects. I created a structured list of pros and cons, discussed the matter "
     "with family members, and considered my long-term objectives. Ultimately, I decided to pursue "
     "further education, as it offered the greatest potential for growth.",
     "A challenging decision I faced recently was whether to end a long-standing commitment that no "
     "longer served me. I considered the emotional impact on myself and others, the practical "
     "consequences, and my overall well-being. After careful reflection and conversations with close "
     "friends, I decided to move forward with the change, prioritizing my mental health and personal "
     "growth."},
    {"A good neighborhood is characterized by a strong sense of community, safety, and accessibility. "
     "Key factors include well-maintained public spaces, reliable public transportation, quality "
     "schools, and access to essential services such as healthcare and grocery stores. Additionally, "
     "a diverse and inclusive population fosters mutual respect and social cohesion. Ultimately, a good "
     "neighborhood is one where residents feel secure, connected, and supported in their daily lives.",
     "Several factors contribute to making a neighborhood a good place to live. First, safety is "
     "essential, as residents need to feel secure in their homes and on the streets. Second, access to "
     "amenities such as parks, shops, and public transportation enhances convenience and quality of "
     "life. Finally, a strong sense of community, where neighbors support one another, creates a "
     "welcoming and inclusive environment.",
     "In my view, a good neighborhood combines safety, convenience, and community. Safe streets and "
     "low crime rates provide peace of mind, while nearby amenities like grocery stores, schools, and "
     "green spaces support a healthy lifestyle. Equally important is a sense of belonging, fostered by "
     "friendly neighbors and local events. Together, these elements create an environment where "
     "people can thrive.",
     "A good place to live typically offers a balance of safety, accessibility, and social connection. "
     "Well-lit streets, clean public areas, and responsive local services contribute to residents' "
     "well-being. Access to education, healthcare, and public transit further enhances daily life. "
     "Moreover, community engagement and mutual respect among neighbors foster a positive and "
     "supportive atmosphere."},
}};

const std::array<Pool, 2> kPolishedAnswers{{
    {"Last year I faced a tough decision about whether to change careers. I considered my financial "
     "situation, my long-term goals, and how the change might affect my family. After discussing it "
     "with my partner and reflecting carefully, I decided to make the switch, and although it was "
     "challenging at first, it has ultimately been rewarding.",
     "A difficult decision I made recently was moving to a new city for work. I weighed the career "
     "benefits against leaving my friends and family behind. I talked it over with people close to me "
     "and thought about where I wanted to be in five years. In the end, I accepted the position, and I "
     "believe it was the right choice.",
     "I recently had to decide whether to care for an elderly parent at home or arrange professional "
     "support. I considered their needs, my work commitments, and the financial impact. After many "
     "conversations with my siblings, we chose a combination of both, which has worked well so far.",
     "One hard decision I made was ending a friendship that had become unhealthy. I thought about our "
     "shared history, the stress it was causing me, and whether things could improve. After reflecting "
     "for some time, I decided to step back, and I feel more at peace now.",
     "I had to decide whether to buy a house or keep renting. I compared monthly costs, long-term "
     "financial security, and the flexibility that renting provides. After researching the market and "
     "speaking with a financial advisor, I decided to keep renting for now, which gives me more freedom."},
    {"In my opinion, a good neighborhood is safe, friendly, and well connected. It is important to "
     "have parks, shops, and good public transport nearby. I also value neighbors who look out for "
     "each other, because a sense of community makes people feel at home.",
     "A good neighborhood should feel safe and welcoming. Access to green spaces, schools, and local "
     "businesses makes daily life easier and more enjoyable. Most importantly, friendly neighbors and "
     "community events help people feel connected.",
     "For me, a good place to live offers safety, convenience, and community. Clean streets, nearby "
     "amenities, and reliable transport are essential. It also helps when neighbors are respectful and "
     "willing to support one another.",
     "I think a good neighborhood combines practical amenities with a strong community spirit. Good "
     "schools, healthcare, and public transport are important, but so is a friendly atmosphere where "
     "people know and help each other.",
     "A neighborhood is a good place to live when it is safe, affordable, and has a strong sense of "
     "community. Parks and local shops add to the quality of life, and neighbors who care about each "
     "other make all the difference."},
}};

const Pool kFillers{"tbh", "lol", "honestly", "like", "idk", "haha", "hmm", "ngl"};

struct CheckPools {
    Pool human;
    Pool prototypical;
};

const std::map<std::string, CheckPools>& check_pools() {
    static const std::map<std::string, CheckPools> pools{
        {"tom_transparent_jar",
         {{"buttons", "Buttons, the jar is see-through", "She can see the buttons so she thinks buttons",
           "buttons because the glass is clear"},
          {"Robin believes the jar is full of sweets, because that is what the label says.",
           "Sweets.", "Robin would believe there are sweets inside, based on the label."}}},
        {"muller_lyer_modified",
         {{"the bottom line is shorter", "bottom one is shorter", "No, the bottom line is shorter",
           "the top line is longer"},
          {"They are the same length.",
           "Both lines are the same length; the fins only create an illusion.",
           "The lines are equal in length."}}},
        {"ebbinghaus_modified",
         {{"the left circle is smaller", "left one is smaller", "No, the left is smaller",
           "left circle smaller"},
          {"They are the same size.",
           "Both orange circles are the same size; the surrounding circles create an illusion.",
           "The two orange circles are identical in size."}}},
    };
    return pools;
}

const Pool kIndeterminate{"not sure", "hard to tell", "no idea", "I can't really see it"};

std::string add_fillers(const std::string& text, double rate, std::mt19937_64& rng) {
    if (rate <= 0.0) return text;
    std::string out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto space = text.find(' ', start);
        if (space == std::string::npos) space = text.size();
        out.append(text, start, space - start);
        if (space < text.size()) {
            out += ' ';
            if (unit(rng) < rate) {
                out += std::string(kFillers[pick(rng, kFillers.size())]) + ' ';
            }
        }
        start = space + 1;
    }
    return out;
}

}  // namespace

std::string open_text_answer(ResponseStyle style, std::size_t topic, double filler_rate,
                             std::mt19937_64& rng) {
    topic %= 2;
    switch (style) {
        case ResponseStyle::agent: {
            const auto& pool = kAgentAnswers[topic];
            return std::string(pool[pick(rng, pool.size())]);
        }
        case ResponseStyle::polished: {
            const auto& pool = kPolishedAnswers[topic];
            return std::string(pool[pick(rng, pool.size())]);
        }
        case ResponseStyle::human:
        case ResponseStyle::spillover: break;
    }
    const auto& slots = topic == 0 ? kDecisionSlots : kNeighbourhoodSlots;
    std::vector<std::string> sentences;
    for (const auto& pool : slots) sentences.emplace_back(pool[pick(rng, pool.size())]);
    if (unit(rng) < 0.6) sentences.emplace_back(kReflections[pick(rng, kReflections.size())]);
    // Fisher-Yates with the portable picker.
    for (std::size_t i = sentences.size(); i > 1; --i) std::swap(sentences[i - 1], sentences[pick(rng, i)]);
    std::string text;
    for (const auto& s : sentences) {
        if (!text.empty()) text += ' ';
        text += s;
    }
    if (style == ResponseStyle::spillover) {
        text = add_fillers(text, filler_rate, rng);
        if (unit(rng) < 0.5) text[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(text[0])));
    }
    return text;
}

std::string check_answer(const std::string& item_id, CheckAnswer kind, std::mt19937_64& rng) {
    if (kind == CheckAnswer::indeterminate) return std::string(kIndeterminate[pick(rng, kIndeterminate.size())]);
    auto it = check_pools().find(item_id);
    if (it == check_pools().end()) return std::string(kIndeterminate[pick(rng, kIndeterminate.size())]);
    const auto& pool = kind == CheckAnswer::human ? it->second.human : it->second.prototypical;
    return std::string(pool[pick(rng, pool.size())]);
}

std::string choice_answer(std::mt19937_64& rng) {
    static const Pool bands{"18-24", "25-34", "35-44", "45-54", "55-64", "65+"};
    return std::string(bands[pick(rng, bands.size())]);
}

std::string keyword_sentence(const std::string& keyword, std::mt19937_64& rng) {
    static const Pool templates{"My favorite ice cream flavor is {}.",
                                "By the way, my favorite ice cream flavor is {}.",
                                "Also, my favorite ice cream flavor is {}."};
    std::string t(templates[pick(rng, templates.size())]);
    t.replace(t.find("{}"), 2, keyword);
    return t;
}

std::string marker_opening(std::mt19937_64& rng) {
    static const Pool openings{
        "Certainly! Here is a thoughtful response to the question.",
        "As an AI, I don't experience difficult choices in the same way humans do, but here is an example.",
        "As an AI language model, I do not have personal experiences, but I can describe a typical situation."};
    return std::string(openings[pick(rng, openings.size())]);
}

}  // namespace sentinel::sim::detail
