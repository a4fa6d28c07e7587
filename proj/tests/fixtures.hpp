// Worked examples shared by the unit and acceptance suites.
#ifndef KEYAPE_TESTS_FIXTURES_HPP
#define KEYAPE_TESTS_FIXTURES_HPP

#include <string>

namespace keyape::fixtures {

// Small post-edit: "ist" is misplaced.
inline const std::string kSmallSrc = "The LMS is open .";
inline const std::string kSmallMt = "Die LMS geöffnet ist .";
inline const std::string kSmallPe = "Die LMS ist geöffnet .";
inline const std::string kSmallL2r = "I:2:ist D:4:ist STOP";
inline const std::string kSmallDeleteFirst = "D:3:ist I:2:ist STOP";

// Longer post-edit with the same minimal script ordered four ways.
inline const std::string kLongSrc =
    "When you decrease opacity , the underlying artwork becomes visible "
    "through the surface of the object , stroke , fill , or text .";
inline const std::string kLongMt =
    "Wenn Sie die Deckkraft verringern , wird das zugrunde liegende "
    "Bildmaterial durch die Oberfläche des Objekts , Kontur , Fläche oder "
    "Text angezeigt .";
inline const std::string kLongPe =
    "Wenn Sie die Deckkraft verringern , wird das darunterliegende "
    "Bildmaterial durch die Oberfläche des Objekts , der Kontur , der Fläche "
    "bzw. des Textes sichtbar .";
inline const std::string kLongL2r =
    "D:8:zugrunde D:8:liegende I:8:darunterliegende I:16:der I:19:der "
    "D:21:oder D:21:Text D:21:angezeigt I:21:bzw. I:22:des I:23:Textes "
    "I:24:sichtbar STOP";
inline const std::string kLongShuff =
    "D:20:oder I:22:bzw. D:20:Text I:22:des I:10:darunterliegende "
    "D:8:zugrunde I:23:sichtbar I:19:der I:24:Textes I:17:der D:22:angezeigt "
    "D:8:liegende STOP";
inline const std::string kLongHord =
    "I:17:der I:20:der D:22:oder I:24:bzw. I:25:des D:22:Text I:25:Textes "
    "D:8:zugrunde D:8:liegende I:8:darunterliegende D:21:angezeigt "
    "I:24:sichtbar STOP";
inline const std::string kLongHuman =
    "I:17:der I:20:der D:22:oder I:22:bzw. I:23:des D:24:Text I:24:Textes "
    "D:8:zugrunde D:8:liegende I:8:darunterliegende D:25:. D:24:angezeigt "
    "I:24:sichtbar I:25:. STOP";

}  // namespace keyape::fixtures

#endif  // KEYAPE_TESTS_FIXTURES_HPP
