#include "refbench/synthcorpus.hpp"

#include <array>

namespace refbench {

namespace {

struct NamePool {
    std::vector<const char*> surnames;
    std::vector<const char*> givens;
    std::vector<const char*> journals;
    std::vector<const char*> publishers;
    std::vector<const char*> places;
};

const NamePool& pool_for(const std::string& lang) {
    static const NamePool en{
        {"Whitfield", "Harmon", "Okafor", "Donnelly", "Pemberton", "Hartley", "Greaves",
         "Sutton", "Mercer", "Blackwood", "Fenwick", "Calloway"},
        {"Alice", "James", "Nora", "Peter", "Ruth", "Daniel", "Clara", "Henry"},
        {"Journal of Historical Geography", "Archive Studies Quarterly",
         "Review of Social History", "Economic Past and Present"},
        {"Clarendon Press", "Beacon Hill Press", "Harrowgate Academic"},
        {"Oxford", "London", "Edinburgh"}};
    static const NamePool de{
        {"Müller", "Schäfer", "Hoffmann", "Köhler", "Bergmann", "Lindemann", "Vogt",
         "Brandt", "Schröder", "Weiß"},
        {"Karl-Heinz", "Ursula", "Jürgen", "Anneliese", "Friedrich", "Gisela"},
        {"Zeitschrift für Agrargeschichte", "Blätter für Landesgeschichte"},
        {"Franz Steiner Verlag", "Vandenhoeck & Ruprecht"},
        {"Stuttgart", "Göttingen", "Leipzig"}};
    static const NamePool it{
        {"Bianchi", "Moretti", "Ferrara", "Colombo", "Ricci", "Greco"},
        {"Giulia", "Marco", "Elena", "Paolo"},
        {"Rivista di Studi Veneziani", "Annali di Storia Urbana"},
        {"Il Mulino", "Olschki"},
        {"Venezia", "Firenze", "Milano"}};
    static const NamePool fr{
        {"Moreau", "Lefèvre", "Garnier", "Perrot", "Chevalier", "Aubert"},
        {"Camille", "Étienne", "Margot", "Pascal"},
        {"Revue d'histoire urbaine", "Cahiers de démographie ancienne"},
        {"Presses de Clermont", "Éditions Valmont"},
        {"Paris", "Lyon", "Genève"}};
    if (lang == "de") return de;
    if (lang == "it") return it;
    if (lang == "fr") return fr;
    return en;
}

std::string make_title(const std::string& lang, size_t seed) {
    static const std::vector<const char*> en_adj = {
        "Urban", "Colonial", "Digital", "Maritime", "Monastic", "Agrarian",
        "Industrial", "Liturgical", "Provincial", "Municipal"};
    static const std::vector<const char*> en_noun = {
        "Archives", "Networks", "Labour", "Settlements", "Chronicles", "Reform",
        "Trade", "Memory", "Cartography", "Guilds", "Parishes"};
    static const std::vector<const char*> en_tail = {
        "in Early Modern Europe", "after the Great Exhibition", "of the Lower Rhine",
        "in Provincial Towns", "under Habsburg Rule", "in the Long Nineteenth Century"};
    static const std::vector<const char*> de_noun = {
        "Sozialgeschichte", "Verwaltung", "Frömmigkeit", "Stadtentwicklung",
        "Agrarverfassung", "Schulpolitik", "Zunftordnung"};
    static const std::vector<const char*> de_region = {
        "Rheinland", "Alpenraum", "Ruhrgebiet", "Ostseeraum", "Breisgau", "Hunsrück"};
    static const std::vector<const char*> it_noun = {
        "tipografia", "confraternita", "mercatura", "diocesi", "cartografia"};
    static const std::vector<const char*> it_city = {
        "Venezia", "Padova", "Verona", "Mantova", "Ferrara"};
    static const std::vector<const char*> fr_noun = {
        "corporations", "paroisses", "imprimeurs", "foires", "hospices"};
    static const std::vector<const char*> fr_city = {
        "Lyon", "Avignon", "Rouen", "Toulouse", "Besançon"};

    if (lang == "de")
        return std::string("Studien zur ") + de_noun[seed % de_noun.size()] + " im " +
               de_region[(seed / 7) % de_region.size()];
    if (lang == "it")
        return std::string("Storia della ") + it_noun[seed % it_noun.size()] + " a " +
               it_city[(seed / 5) % it_city.size()];
    if (lang == "fr")
        return std::string("Les ") + fr_noun[seed % fr_noun.size()] + " de " +
               fr_city[(seed / 5) % fr_city.size()];
    return std::string(en_adj[seed % en_adj.size()]) + " " +
           en_noun[(seed / 3) % en_noun.size()] + " " + en_tail[(seed / 11) % en_tail.size()];
}

std::string initial_of(const std::string& given) {
    // First code point plus a period; handles the accented initials.
    size_t len = 1;
    unsigned char b = given[0];
    if ((b & 0xE0) == 0xC0) len = 2;
    else if ((b & 0xF0) == 0xE0) len = 3;
    return given.substr(0, len) + ".";
}

struct RefSpec {
    std::string raw;
    ReferenceRecord record;
    bool abbreviated = false;
};

// One deterministic reference.  `style` cycles through journal-article and
// monograph layouts in the document's language.
RefSpec make_reference(const std::string& lang, size_t doc_idx, size_t ref_idx,
                       size_t& page_counter) {
    const NamePool& pool = pool_for(lang);
    size_t seed = doc_idx * 37 + ref_idx * 11;

    std::string surname = pool.surnames[(doc_idx * 5 + ref_idx) % pool.surnames.size()];
    std::string given = pool.givens[(doc_idx + ref_idx * 3) % pool.givens.size()];
    std::string initial = initial_of(given);
    std::string title = make_title(lang, seed);
    std::string year = std::to_string(1872 + (doc_idx * 17 + ref_idx * 13) % 140);
    size_t first_page = 10 + 3 * page_counter;
    ++page_counter;
    std::string pages = std::to_string(first_page) + "-" + std::to_string(first_page + 17);
    std::string volume = std::to_string(1 + (seed % 58));
    std::string issue = std::to_string(1 + (seed % 4));

    RefSpec ref;
    ReferenceRecord& rec = ref.record;
    rec.authors = {surname + ", " + initial};
    rec.full_title = title;
    rec.year = year;
    rec.pages = pages;

    int style = static_cast<int>((doc_idx + ref_idx) % 3);
    if (style == 0) {
        // Journal article.
        std::string journal = pool.journals[seed % pool.journals.size()];
        rec.container_title = journal;
        rec.volume = volume;
        rec.issue = issue;
        if (ref_idx % 3 == 0)
            rec.doi = "10.5281/ref." + std::to_string(doc_idx) + "." + std::to_string(ref_idx);
        if (lang == "de") {
            ref.raw = surname + ", " + initial + ": " + title + ", in: " + journal + " " +
                      volume + " (" + year + "), S. " + pages + ".";
        } else {
            ref.raw = surname + ", " + initial + " (" + year + "). " + title + ". " +
                      journal + ", " + volume + "(" + issue + "), pp. " + pages + ".";
            if (!rec.doi.empty()) ref.raw += " doi:" + rec.doi;
        }
    } else if (style == 1) {
        // Monograph.
        std::string publisher = pool.publishers[seed % pool.publishers.size()];
        std::string place = pool.places[(seed / 3) % pool.places.size()];
        rec.publisher = publisher;
        rec.place = place;
        if (lang == "de") {
            ref.raw = surname + ", " + given + ": " + title + ". " + publisher + ", " +
                      place + " " + year + ", S. " + pages + ".";
            rec.authors = {surname + ", " + given};
        } else if (lang == "it") {
            ref.raw = surname + ", " + given + ", " + title + ", " + publisher + ", " +
                      place + " " + year + ", pp. " + pages + ".";
            rec.authors = {surname + ", " + given};
        } else if (lang == "fr") {
            ref.raw = surname + ", " + initial + ", " + title + ", " + place + ", " +
                      publisher + ", " + year + ", p. " + pages + ".";
        } else {
            ref.raw = surname + ", " + given + " (" + year + "). " + title + ". " + place +
                      ": " + publisher + ", pp. " + pages + ".";
            rec.authors = {surname + ", " + given};
        }
    } else {
        // Chapter in an edited volume.
        std::string ed_surname = pool.surnames[(doc_idx * 3 + ref_idx + 4) % pool.surnames.size()];
        std::string ed_given = pool.givens[(doc_idx + ref_idx + 2) % pool.givens.size()];
        std::string container = make_title(lang, seed + 101);
        std::string publisher = pool.publishers[(seed + 1) % pool.publishers.size()];
        rec.editors = {ed_surname + ", " + initial_of(ed_given)};
        rec.container_title = container;
        rec.publisher = publisher;
        if (lang == "de") {
            ref.raw = surname + ", " + initial + ": " + title + ", in: " + ed_surname +
                      ", " + initial_of(ed_given) + " (Hrsg.): " + container + ". " +
                      publisher + " " + year + ", S. " + pages + ".";
        } else {
            ref.raw = surname + ", " + initial + " (" + year + "). " + title + ". In " +
                      ed_surname + ", " + initial_of(ed_given) + " (Ed.), " + container +
                      ", pp. " + pages + ". " + publisher + ".";
        }
    }
    return ref;
}

RefSpec make_abbreviated_reference(size_t& page_counter) {
    size_t page = 10 + 3 * page_counter;
    ++page_counter;
    RefSpec ref;
    ref.raw = "Ebd., S. " + std::to_string(page) + ".";
    ref.record.pages = std::to_string(page);
    ref.abbreviated = true;
    return ref;
}

std::string prose_paragraph(const std::string& lang, size_t seed) {
    static const std::vector<const char*> en = {
        "The reading room kept its shutters closed against the afternoon heat.",
        "Parish clerks copied the same formulas for generations without comment.",
        "A ledger of this kind rewards slow and repeated reading.",
        "The guild statutes mention neither looms nor dyes by name.",
        "Most of the surviving correspondence concerns grain and timber.",
        "Travellers rarely described the harbour without mentioning its smell.",
    };
    static const std::vector<const char*> de = {
        "Die Ratsprotokolle schweigen über die Vorgänge jener Woche.",
        "Im Stadtarchiv liegen die Rechnungsbücher der Hospitäler.",
        "Über die Herkunft der Meister ist wenig bekannt.",
        "Die Visitationsberichte zeichnen ein nüchternes Bild der Gemeinden.",
        "Der Briefwechsel der Kaufleute blieb nahezu vollständig erhalten.",
    };
    static const std::vector<const char*> it = {
        "Le carte notarili descrivono botteghe strette e affollate.",
        "Il registro delle confraternite tace sulle processioni minori.",
        "La laguna imponeva ritmi propri al commercio cittadino.",
        "Gli inventari dei librai elencano volumi ormai perduti.",
    };
    static const std::vector<const char*> fr = {
        "Les registres paroissiaux demeurent la source la plus bavarde.",
        "Le chroniqueur note les foires sans jamais compter les marchands.",
        "Les délibérations consulaires évoquent des travaux sans fin.",
        "L'inventaire après décès révèle un intérieur modeste.",
    };
    const std::vector<const char*>& sentences =
        lang == "de" ? de : lang == "it" ? it : lang == "fr" ? fr : en;
    std::string out;
    for (size_t k = 0; k < 4; ++k) {
        if (!out.empty()) out += ' ';
        out += sentences[(seed + k * 3 + seed / 5) % sentences.size()];
    }
    return out;
}

const char* bibliography_header(const std::string& lang) {
    if (lang == "de") return "## Literaturverzeichnis";
    if (lang == "it") return "## Bibliografia";
    if (lang == "fr") return "## Bibliographie";
    return "## References";
}

DocumentGold make_document(size_t doc_idx, const std::string& lang, int citation_class,
                           const std::string& category, size_t& page_counter) {
    DocumentGold doc;
    doc.doc_id = "synth-" + std::string(doc_idx < 10 ? "0" : "") + std::to_string(doc_idx);
    doc.language = lang;
    doc.citation_class = citation_class;
    doc.category = category;
    doc.has_records = true;

    std::vector<RefSpec> refs;
    size_t n_body_refs = citation_class == kFootnoteOnly ? 7 : citation_class == kMixed ? 8 : 10;
    for (size_t r = 0; r < n_body_refs; ++r)
        refs.push_back(make_reference(lang, doc_idx, r, page_counter));
    if (citation_class == kFootnoteOnly || citation_class == kMixed) {
        // One verbatim abbreviated back-reference, never resolved.
        refs.insert(refs.begin() + 3, make_abbreviated_reference(page_counter));
    }

    // Eight pages; reference-bearing pages stay at one quarter of them.
    std::array<std::string, 8> pages;
    pages[0] = "# " + make_title(lang, doc_idx * 131) + "\n\n" +
               prose_paragraph(lang, doc_idx * 3);
    for (size_t p = 1; p < 8; ++p)
        pages[p] = prose_paragraph(lang, doc_idx * 7 + p * 5) + "\n\n" +
                   prose_paragraph(lang, doc_idx * 11 + p * 3);

    auto footnote_block = [&](size_t first, size_t count) {
        std::string block = "\n\n---\n";
        for (size_t k = 0; k < count && first + k < refs.size(); ++k)
            block += "[^" + std::to_string(first + k + 1) + "]: " + refs[first + k].raw + "\n";
        return block;
    };
    auto bibliography_block = [&](size_t first, size_t count) {
        std::string block = std::string(bibliography_header(lang)) + "\n\n";
        for (size_t k = 0; k < count && first + k < refs.size(); ++k)
            block += "[" + std::to_string(first + k + 1) + "] " + refs[first + k].raw + "\n";
        return block;
    };

    if (citation_class == kFootnoteOnly) {
        size_t half = refs.size() / 2;
        pages[2] += footnote_block(0, half);
        pages[5] += footnote_block(half, refs.size() - half);
    } else if (citation_class == kMixed) {
        size_t in_footnotes = 4;
        pages[2] += footnote_block(0, in_footnotes);
        pages[7] = bibliography_block(in_footnotes, refs.size() - in_footnotes);
    } else {
        size_t half = refs.size() / 2;
        pages[6] = bibliography_block(0, half);
        pages[7] = bibliography_block(half, refs.size() - half);
    }

    for (size_t p = 0; p < pages.size(); ++p) {
        if (p > 0) doc.markdown += "\n\f\n";
        doc.markdown += pages[p];
    }

    for (const RefSpec& ref : refs) {
        doc.gold_strings.push_back(ref.raw);
        ReferenceRecord rec = ref.record;
        rec.raw = ref.raw;
        doc.gold_records.push_back(std::move(rec));
        doc.abbreviated_backref.push_back(ref.abbreviated);
    }
    return doc;
}

}  // namespace

std::vector<DocumentGold> make_synthetic_corpus() {
    static const std::vector<const char*> en_categories = {
        "Computer Science", "Neuroscience",      "Economics",   "History",
        "Philosophy",       "Health Professions", "Sociology",  "Mathematics",
        "Linguistics",      "Engineering",       "Archaeology", "Political Science"};
    std::vector<DocumentGold> docs;
    size_t page_counter = 0;
    size_t idx = 0;
    for (size_t k = 0; k < 12; ++k, ++idx)
        docs.push_back(make_document(idx, "en", kEndSection, en_categories[k], page_counter));
    for (size_t k = 0; k < 5; ++k, ++idx)
        docs.push_back(make_document(idx, "de", kFootnoteOnly, "History", page_counter));
    for (size_t k = 0; k < 3; ++k, ++idx)
        docs.push_back(make_document(idx, "de", kMixed, "Sociology", page_counter));
    for (size_t k = 0; k < 2; ++k, ++idx)
        docs.push_back(make_document(idx, "it", kEndSection, "History", page_counter));
    for (size_t k = 0; k < 2; ++k, ++idx)
        docs.push_back(make_document(idx, "fr", kEndSection, "History", page_counter));
    return docs;
}

std::vector<ReferenceGold> make_synthetic_references() {
    std::vector<ReferenceGold> refs;
    for (const DocumentGold& doc : make_synthetic_corpus()) {
        for (size_t i = 0; i < doc.gold_strings.size(); ++i) {
            ReferenceGold ref;
            ref.ref_id = doc.doc_id + ":" + std::to_string(i + 1);
            ref.doc_id = doc.doc_id;
            ref.language = doc.language;
            ref.raw = doc.gold_strings[i];
            ref.record = doc.gold_records[i];
            refs.push_back(std::move(ref));
        }
    }
    return refs;
}

std::string corpus_to_jsonl(const std::vector<DocumentGold>& docs) {
    std::string out;
    for (const auto& d : docs) out += document_gold_to_json_line(d) + "\n";
    return out;
}

std::string references_to_jsonl(const std::vector<ReferenceGold>& refs) {
    std::string out;
    for (const auto& r : refs) out += reference_gold_to_json_line(r) + "\n";
    return out;
}

}  // namespace refbench
