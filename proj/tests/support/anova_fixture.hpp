#pragma once

#include <array>

// Frozen 10x4x5 score matrix (subject-major, then model, then encoding) with
// independently computed repeated-measures reference statistics. The matrix
// was drawn once from a seeded generator; the reference numbers below were
// produced by an external numerical package and are treated as ground truth.
namespace anova_fixture {

inline constexpr std::array<double, 200> kMatrix = {
    0.34114238873893987, 0.37413120945909706, 0.3437842683864577, 0.38809709085986849,
    0.34558000041442344, 0.38460138869667876, 0.42805100008926883, 0.37279619421016391,
    0.43810618269055107, 0.39766995407523759, 0.44451962061019767, 0.47342984944615318,
    0.42248639548027606, 0.49830425942334722, 0.44478965263848169, 0.35685667505620777,
    0.38880701401223206, 0.32990815693782127, 0.41956509322780455, 0.39742320728326858,
    0.36196489871885151, 0.3995431833087868, 0.33503226658807478, 0.42436481469022524,
    0.37203970155514454, 0.42145985433426625, 0.43469173387130794, 0.39035583897442477,
    0.462908585664002, 0.43821748020827744, 0.46601537977647839, 0.48118924467501456,
    0.45374647696607473, 0.49582971912321977, 0.47273668216416675, 0.37786681157256302,
    0.41893379348776555, 0.36796630377250739, 0.43037248202578271, 0.41560918384726669,
    0.41547986547516924, 0.44780402801006153, 0.39909448156402089, 0.45422844144915958,
    0.42664607904258922, 0.47864229342008352, 0.46971919157423292, 0.4611933780381467,
    0.50467564810432197, 0.45891704962984364, 0.50939824761536279, 0.53399546614955862,
    0.48912636762219713, 0.56774571854450429, 0.52122195574419417, 0.43239924360704846,
    0.46028402429409071, 0.42417242056648502, 0.48101693956123259, 0.44416893554001202,
    0.42911632335174182, 0.45445787921231356, 0.40232339871474498, 0.47218888083513894,
    0.43481076041124184, 0.47753876861848893, 0.50804335962014602, 0.46564778187381312,
    0.53729267389273805, 0.49309014934168588, 0.5313345630718822, 0.55608472322539515,
    0.52480727012147133, 0.57354005359559301, 0.5278841958783943, 0.44327772209922522,
    0.47594787219310924, 0.40972939433152611, 0.49770565680447265, 0.46012479388521949,
    0.4288236378074799, 0.43574484070733632, 0.38889159698857978, 0.46285142542079821,
    0.42302371401070488, 0.45829087485319803, 0.48748189163649086, 0.44826316949876488,
    0.50380138170146516, 0.473591425840104, 0.51377992523141747, 0.55014096436639459,
    0.49759708592607338, 0.56966396802622599, 0.51398470212036207, 0.41963922764724554,
    0.45691358725760667, 0.41391420735184242, 0.49898312789700877, 0.44577711307464174,
    0.42475812647608097, 0.44461350076931339, 0.40629309179528705, 0.47162313747929085,
    0.4338116560860219, 0.47572710641885957, 0.50998802182674075, 0.45707017513069753,
    0.52150941345069013, 0.47649969227257172, 0.50437755275720186, 0.56188963171223827,
    0.48772215872601082, 0.55413148310255944, 0.5067892648292629, 0.42876849278651796,
    0.47043401300094367, 0.41484892519848876, 0.48305579357983891, 0.44265573534821201,
    0.39671989476021541, 0.42369625464848043, 0.38598729181749641, 0.46976470898701661,
    0.40530861293466602, 0.44763998663210597, 0.47378381097418143, 0.43295356568182641,
    0.50291212763841642, 0.46218156109376018, 0.49272474129073895, 0.52408699208960141,
    0.48136006681559906, 0.54379653073000322, 0.51764330348095744, 0.41423764375293526,
    0.44456304496371402, 0.41391430784422228, 0.46153002451754677, 0.43448154107221132,
    0.39629996028300335, 0.4120674856819122, 0.37135705987012502, 0.42512952612242516,
    0.4095316837707022, 0.44464988611601314, 0.46561706953858661, 0.41085539511455627,
    0.48288069610497247, 0.45292553925578882, 0.48772549347126876, 0.51515713749967973,
    0.46702872108826604, 0.54141140368409557, 0.49140904088717879, 0.39726672548211284,
    0.4527204294003071, 0.39522811323765139, 0.45719240649901377, 0.41797361205978784,
    0.4088871759304446, 0.42478673853569321, 0.36389966700052134, 0.45667850675272004,
    0.41100951871568453, 0.43308465925688222, 0.47797487887919821, 0.43322303816715835,
    0.49755131684295401, 0.45911447050711046, 0.48783651682155055, 0.52794808196381771,
    0.49399235698221827, 0.53583210030422856, 0.49939604962010115, 0.40780611453891513,
    0.45221637944727405, 0.39532231210061525, 0.46598901264072717, 0.42089995062547486,
    0.4213092430150322, 0.44448887035455581, 0.40842301982819779, 0.47714944455632546,
    0.42507235616902006, 0.46152786191356654, 0.48946703261349445, 0.45413459913915522,
    0.49899023579472779, 0.48196900466573417, 0.51637929912433223, 0.55171102907584058,
    0.4951682255668225, 0.5667991383674591, 0.53993900975710962, 0.43980664296425875,
    0.46081618772121974, 0.42400099127610297, 0.49147563163957392, 0.45274177808429333
};

inline constexpr int kSubjects = 10;
inline constexpr int kModels = 4;
inline constexpr int kEncodings = 5;

// Per-effect references: sums of squares, error sums of squares, F, p,
// partial eta squared, and the sphericity epsilon for each effect in order
// model, encoding, interaction.
inline constexpr double kSsEffect[3] = {0.268307985409358, 0.106252468157853, 0.0012157409757408};
inline constexpr double kSsError[3] = {0.00150028528150108, 0.00183618385564024, 0.00834583818082029};
inline constexpr double kF[3] = {1609.54179745613, 520.7932803043, 1.31103294176161};
inline constexpr double kP[3] = {1.53946470961263e-30, 2.59511439823741e-31, 0.222741895134898};
inline constexpr double kPartialEta[3] = {0.994439439244544, 0.983012242067641, 0.127148555257901};
inline constexpr double kGgEpsilon[3] = {0.708415932313825, 0.751526339042819, 0.44868568794558};

}  // namespace anova_fixture
