import { writeFileSync } from "node:fs";
import { basename } from "node:path";
import yargs from "yargs";
import { CsvError, readColumns } from "./csv.js";
import { renderClosedLoop } from "./closedLoop.js";
import { renderStaticMap } from "./staticMap.js";

const MAP_COLS = ["theta", "r"];
const RUN_COLS = [
  "t",
  "x_true",
  "y_true",
  "x_meas",
  "y_meas",
  "y_out",
  "r",
  "theta",
  "epsilon",
];

interface Args {
  kind: string;
  in: string;
  in2?: string;
  out: string;
  thetaStar: number;
}

function render(args: Args): string {
  const required = args.kind === "static-map" ? MAP_COLS : RUN_COLS;
  const inputs = [args.in, ...(args.in2 ? [args.in2] : [])].map((path) => ({
    cols: readColumns(path, required),
    label: basename(path).replace(/\.csv$/, ""),
  }));
  if (args.kind === "static-map") return renderStaticMap(inputs);
  return renderClosedLoop(inputs, args.thetaStar);
}

export async function main(argv: string[]): Promise<number> {
  const parsed = await yargs(argv)
    .command("static-map", "plot r vs theta from a static-map CSV")
    .command("closed-loop", "plot state / r / theta panels from a run CSV")
    .demandCommand(1, "pick a figure kind: static-map or closed-loop")
    .option("in", { type: "string", demandOption: true, describe: "input CSV" })
    .option("in2", { type: "string", describe: "second CSV to overlay" })
    .option("out", { type: "string", demandOption: true, describe: "output SVG" })
    .option("theta-star", {
      type: "number",
      default: -3.0,
      describe: "reference line for the theta panel",
    })
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      throw new CsvError(msg);
    })
    .parse();

  const kind = String(parsed._[0]);
  if (kind !== "static-map" && kind !== "closed-loop") {
    process.stderr.write(`error: unknown figure kind "${kind}"\n`);
    return 2;
  }
  const out = parsed.out as string;
  if (!out.endsWith(".svg")) {
    // vector output only: nothing in this toolchain encodes raster images
    process.stderr.write(`error: output must be an .svg path, got ${out}\n`);
    return 2;
  }
  try {
    const body = render({
      kind,
      in: parsed.in as string,
      in2: parsed.in2 as string | undefined,
      out,
      thetaStar: parsed.thetaStar as number,
    });
    writeFileSync(out, body);
  } catch (err) {
    if (err instanceof CsvError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
  process.stdout.write(`figure written to ${out}\n`);
  return 0;
}

const isEntry =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (isEntry) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
