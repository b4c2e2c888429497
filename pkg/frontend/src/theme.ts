/** Fixed display palette and label/attribute vocabularies.
 *
 * The palette is the studio's shipped theme for the 19 layout classes; it
 * matches the palette the service reports under GET /meta, so indexed layout
 * PNGs written by either side look the same everywhere. /meta stays the
 * runtime authority for names; these lists back offline rendering and tests.
 */

export const CLASS_COUNT = 19;
export const UNLABELED_INDEX = 18;
export const ATTRIBUTE_COUNT = 40;

export const CLASS_NAMES: readonly string[] = [
  "sky",
  "building",
  "grass",
  "tree",
  "mountain",
  "rock",
  "road",
  "field",
  "ground",
  "earth",
  "sea",
  "water",
  "plant",
  "roof",
  "city",
  "village",
  "cityscape",
  "hill",
  "unlabeled",
];

export type Rgb = readonly [number, number, number];

export const PALETTE: readonly Rgb[] = [
  [135, 206, 235],
  [156, 102, 102],
  [124, 200, 84],
  [34, 120, 52],
  [139, 115, 85],
  [128, 128, 120],
  [90, 90, 96],
  [218, 185, 105],
  [160, 132, 92],
  [120, 84, 56],
  [28, 90, 160],
  [64, 150, 210],
  [88, 170, 110],
  [178, 70, 50],
  [110, 110, 140],
  [200, 160, 120],
  [80, 80, 110],
  [150, 170, 90],
  [0, 0, 0],
];

export const ATTRIBUTE_NAMES: readonly string[] = [
  "dirty",
  "daylight",
  "night",
  "sunrisesunset",
  "dawndusk",
  "sunny",
  "clouds",
  "fog",
  "storm",
  "snow",
  "warm",
  "cold",
  "busy",
  "beautiful",
  "flowers",
  "spring",
  "summer",
  "autumn",
  "winter",
  "glowing",
  "colorful",
  "dull",
  "rugged",
  "midday",
  "dark",
  "bright",
  "dry",
  "moist",
  "windy",
  "rain",
  "ice",
  "cluttered",
  "soothing",
  "stressful",
  "exciting",
  "sentimental",
  "mysterious",
  "boring",
  "gloomy",
  "lush",
];

export function cssColor(classIndex: number): string {
  const rgb = PALETTE[classIndex];
  if (rgb === undefined) {
    throw new RangeError(`class index ${classIndex} outside [0, ${CLASS_COUNT - 1}]`);
  }
  return `rgb(${rgb[0]}, ${rgb[1]}, ${rgb[2]})`;
}
