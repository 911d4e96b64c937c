/**
 * Externalized interface strings. Every user-visible label lives here so the
 * whole chrome can switch between English and Bangla.
 */

export type UiLanguage = "en" | "bn";

export interface Strings {
  appTitle: string;
  questionPlaceholder: string;
  send: string;
  cancel: string;
  retry: string;
  waiting: string;
  pipelineLabel: string;
  pipelineVanilla: string;
  pipelineAdvanced: string;
  compareLabel: string;
  languageLabel: string;
  corpusLabel: string;
  chunksHeading: string;
  traceHeading: string;
  scoreLabel: string;
  verdictRelevant: string;
  verdictIrrelevant: string;
  verdictFailOpen: string;
  verdictNone: string;
  refinedTo: string;
  chunksRetrieved: string;
  exhaustedBanner: string;
  emptyTrace: string;
  errorPrefix: string;
  networkError: string;
}

const EN: Strings = {
  appTitle: "Gazette QA",
  questionPlaceholder: "Ask about the gazettes…",
  send: "Send",
  cancel: "Cancel",
  retry: "Retry",
  waiting: "Waiting for the answer…",
  pipelineLabel: "Pipeline",
  pipelineVanilla: "Vanilla",
  pipelineAdvanced: "Advanced",
  compareLabel: "Compare both",
  languageLabel: "Language",
  corpusLabel: "Corpus",
  chunksHeading: "Retrieved chunks",
  traceHeading: "Retrieval trace",
  scoreLabel: "score",
  verdictRelevant: "relevant",
  verdictIrrelevant: "irrelevant",
  verdictFailOpen: "fail-open",
  verdictNone: "no check",
  refinedTo: "refined to",
  chunksRetrieved: "chunks",
  exhaustedBanner: "Refinement budget exhausted — answered from the last retrieval.",
  emptyTrace: "No trace recorded.",
  errorPrefix: "Request failed",
  networkError: "Could not reach the service.",
};

const BN: Strings = {
  appTitle: "গেজেট প্রশ্নোত্তর",
  questionPlaceholder: "গেজেট সম্পর্কে প্রশ্ন করুন…",
  send: "পাঠান",
  cancel: "বাতিল",
  retry: "আবার চেষ্টা করুন",
  waiting: "উত্তরের জন্য অপেক্ষা চলছে…",
  pipelineLabel: "পাইপলাইন",
  pipelineVanilla: "সাধারণ",
  pipelineAdvanced: "উন্নত",
  compareLabel: "দুটোই তুলনা করুন",
  languageLabel: "ভাষা",
  corpusLabel: "কর্পাস",
  chunksHeading: "প্রাপ্ত অংশ",
  traceHeading: "অনুসন্ধানের ধারা",
  scoreLabel: "স্কোর",
  verdictRelevant: "প্রাসঙ্গিক",
  verdictIrrelevant: "অপ্রাসঙ্গিক",
  verdictFailOpen: "ফেল-ওপেন",
  verdictNone: "যাচাই হয়নি",
  refinedTo: "পরিমার্জিত প্রশ্ন",
  chunksRetrieved: "অংশ",
  exhaustedBanner: "পরিমার্জনের সীমা শেষ — সর্বশেষ অনুসন্ধান থেকে উত্তর দেওয়া হয়েছে।",
  emptyTrace: "কোনো ধারা রেকর্ড হয়নি।",
  errorPrefix: "অনুরোধ ব্যর্থ",
  networkError: "সার্ভিসের সাথে যোগাযোগ করা যায়নি।",
};

export const STRINGS: Record<UiLanguage, Strings> = { en: EN, bn: BN };

export function stringsFor(language: UiLanguage): Strings {
  return STRINGS[language];
}
