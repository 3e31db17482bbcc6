#!/usr/bin/env python3
"""Regenerates the synthetic evaluation corpus under corpus/synthetic/.

Each case plants one relevant section (prose about the exception plus a
trace or code block) inside a page full of boilerplate: navigation bars,
ad blocks, related-link sidebars and footers.  The gold text is exactly the
planted section's text.  Output is deterministic.
"""

import html
import json
import random
import shutil
from pathlib import Path

OUT = Path(__file__).resolve().parent / "synthetic"
SEED = 20140614


def frame(pkg, cls, method, file_line):
    return f"\tat {pkg}.{cls}.{method}({file_line})"


CASES = [
    dict(
        exc="java.io.EOFException",
        headline='Exception in thread "main" java.io.EOFException',
        frames=[
            frame("java.io", "ObjectInputStream$PeekInputStream", "readFully", "ObjectInputStream.java:2325"),
            frame("java.io", "ObjectInputStream$BlockDataInputStream", "readShort", "ObjectInputStream.java:2794"),
            frame("java.io", "ObjectInputStream", "readStreamHeader", "ObjectInputStream.java:801"),
            frame("java.io", "ObjectInputStream", "<init>", "ObjectInputStream.java:299"),
            frame("core", "MyEOFTest", "main", "MyEOFTest.java:40"),
        ],
        code="""FileInputStream fis = new FileInputStream(file);
ObjectInputStream ois = new ObjectInputStream(fis);
ArrayList<Record> currentList = new ArrayList<>();
int size = ois.readInt();
for (int i = 0; i < size; i++) {
    Record current = (Record) ois.readObject();
    currentList.add(current);
}""",
        title="EOFException when creating ObjectInputStream on an empty file",
        prose=[
            "The EOFException is thrown by the ObjectInputStream constructor itself. "
            "It calls readStreamHeader, which uses readShort and readFully to read the "
            "serialization header, and an empty FileInputStream has no header to read.",
            "Check the file length before you wrap the FileInputStream, or catch the "
            "EOFException and treat it as an empty list. Only call readInt after the "
            "header has been read successfully.",
        ],
        fix="""if (file.length() > 0) {
    ObjectInputStream ois = new ObjectInputStream(new FileInputStream(file));
    int size = ois.readInt();
}""",
    ),
    dict(
        exc="java.lang.NullPointerException",
        headline='Exception in thread "main" java.lang.NullPointerException',
        frames=[
            frame("com.shop.cart", "CartService", "totalPrice", "CartService.java:57"),
            frame("com.shop.cart", "CartController", "checkout", "CartController.java:31"),
            frame("com.shop", "App", "main", "App.java:12"),
        ],
        code="""Cart cart = repository.findCart(userId);
BigDecimal total = cart.getItems().stream()
    .map(Item::getPrice)
    .reduce(BigDecimal.ZERO, BigDecimal::add);""",
        title="NullPointerException in CartService.totalPrice",
        prose=[
            "The NullPointerException at CartService.totalPrice means findCart returned "
            "null for this userId, so calling getItems on the cart fails before the "
            "stream even starts.",
            "Make findCart return an Optional or create an empty Cart when none exists. "
            "Checking cart for null in totalPrice before calling getItems also removes "
            "the exception reported from checkout.",
        ],
        fix="""Cart cart = repository.findCart(userId);
if (cart == null) {
    return BigDecimal.ZERO;
}
BigDecimal total = cart.getItems().stream()
    .map(Item::getPrice)
    .reduce(BigDecimal.ZERO, BigDecimal::add);""",
    ),
    dict(
        exc="java.lang.ArrayIndexOutOfBoundsException",
        headline='Exception in thread "main" java.lang.ArrayIndexOutOfBoundsException: Index 5 out of bounds for length 5',
        frames=[
            frame("org.grades", "GradeBook", "average", "GradeBook.java:22"),
            frame("org.grades", "GradeBook", "main", "GradeBook.java:9"),
        ],
        code="""int[] scores = new int[5];
int sum = 0;
for (int i = 0; i <= scores.length; i++) {
    sum += scores[i];
}
return sum / scores.length;""",
        title="ArrayIndexOutOfBoundsException: Index 5 out of bounds for length 5 in loop",
        prose=[
            "Your loop condition uses i <= scores.length, so the last iteration reads "
            "scores[5]. Arrays are indexed from zero, and an array of length 5 has no "
            "index 5, hence the ArrayIndexOutOfBoundsException inside average.",
            "Use a strict less-than comparison, or an enhanced for loop that never "
            "touches the index at all.",
        ],
        fix="""int sum = 0;
for (int i = 0; i < scores.length; i++) {
    sum += scores[i];
}
return sum / scores.length;""",
    ),
    dict(
        exc="java.lang.ClassCastException",
        headline='Exception in thread "main" java.lang.ClassCastException: java.lang.Integer cannot be cast to java.lang.String',
        frames=[
            frame("net.report", "ReportBuilder", "addRow", "ReportBuilder.java:48"),
            frame("net.report", "ReportBuilder", "build", "ReportBuilder.java:30"),
            frame("net.report", "Main", "main", "Main.java:7"),
        ],
        code="""Map<String, Object> row = results.get(0);
String count = (String) row.get("count");
builder.append(count);""",
        title="ClassCastException: Integer cannot be cast to String in ReportBuilder",
        prose=[
            "The value stored under count is an Integer, not a String. The cast in "
            "addRow compiles because the map holds Object values, but at runtime the "
            "JVM throws ClassCastException.",
            "Convert with String.valueOf instead of casting, or declare the map with "
            "the real value type so the compiler catches the mistake in build.",
        ],
        fix="""Map<String, Object> row = results.get(0);
String count = String.valueOf(row.get("count"));
builder.append(count);""",
    ),
    dict(
        exc="java.lang.NumberFormatException",
        headline='Exception in thread "main" java.lang.NumberFormatException: For input string: "12 "',
        frames=[
            frame("java.lang", "NumberFormatException", "forInputString", "NumberFormatException.java:65"),
            frame("java.lang", "Integer", "parseInt", "Integer.java:580"),
            frame("java.lang", "Integer", "parseInt", "Integer.java:615"),
            frame("app.config", "PortReader", "readPort", "PortReader.java:19"),
        ],
        code="""String line = reader.readLine();
int port = Integer.parseInt(line);
server.listen(port);""",
        title="NumberFormatException For input string with trailing space",
        prose=[
            "Integer.parseInt does not trim its argument. The line read by readPort "
            "ends with a space, and forInputString reports that space as an invalid "
            "digit, raising NumberFormatException.",
            "Call trim on the line before parseInt, and validate that the value is "
            "within the allowed port range before calling listen.",
        ],
        fix="""String line = reader.readLine();
int port = Integer.parseInt(line.trim());
server.listen(port);""",
    ),
    dict(
        exc="java.util.ConcurrentModificationException",
        headline='Exception in thread "main" java.util.ConcurrentModificationException',
        frames=[
            frame("java.util", "ArrayList$Itr", "checkForComodification", "ArrayList.java:1013"),
            frame("java.util", "ArrayList$Itr", "next", "ArrayList.java:967"),
            frame("io.tasks", "TaskQueue", "purgeFinished", "TaskQueue.java:44"),
        ],
        code="""for (Task task : tasks) {
    if (task.isFinished()) {
        tasks.remove(task);
    }
}""",
        title="ConcurrentModificationException when removing from ArrayList in for-each loop",
        prose=[
            "You remove elements from tasks while iterating over it with a for-each "
            "loop. The iterator notices the structural change in next and "
            "checkForComodification throws ConcurrentModificationException.",
            "Use the iterator remove method, or removeIf, so the list and the iterator "
            "stay consistent while purgeFinished runs.",
        ],
        fix="""tasks.removeIf(task -> task.isFinished());""",
    ),
    dict(
        exc="java.io.FileNotFoundException",
        headline='Exception in thread "main" java.io.FileNotFoundException: config/settings.properties (No such file or directory)',
        frames=[
            frame("java.io", "FileInputStream", "open0", "Native Method"),
            frame("java.io", "FileInputStream", "open", "FileInputStream.java:219"),
            frame("java.io", "FileInputStream", "<init>", "FileInputStream.java:157"),
            frame("com.tool.settings", "SettingsLoader", "load", "SettingsLoader.java:26"),
        ],
        code="""Properties props = new Properties();
FileInputStream in = new FileInputStream("config/settings.properties");
props.load(in);""",
        title="FileNotFoundException for a relative path to settings.properties",
        prose=[
            "A relative path passed to FileInputStream is resolved against the working "
            "directory of the JVM, not against the location of SettingsLoader. When you "
            "start the program from another folder, open fails with FileNotFoundException.",
            "Load the properties from the classpath with getResourceAsStream, or build "
            "an absolute path from a known base directory before calling load.",
        ],
        fix="""Properties props = new Properties();
InputStream in = SettingsLoader.class.getResourceAsStream("/settings.properties");
props.load(in);""",
    ),
    dict(
        exc="java.sql.SQLException",
        headline='Exception in thread "main" java.sql.SQLException: No suitable driver found for jdbc:mysql://localhost/shop',
        frames=[
            frame("java.sql", "DriverManager", "getConnection", "DriverManager.java:702"),
            frame("java.sql", "DriverManager", "getConnection", "DriverManager.java:228"),
            frame("com.shop.db", "Database", "connect", "Database.java:15"),
        ],
        code="""String url = "jdbc:mysql://localhost/shop";
Connection conn = DriverManager.getConnection(url, user, password);
Statement stmt = conn.createStatement();""",
        title="SQLException: No suitable driver found for jdbc:mysql",
        prose=[
            "DriverManager.getConnection throws SQLException with No suitable driver "
            "found when no registered driver accepts the mysql URL. The MySQL connector "
            "jar is missing from the runtime classpath of your connect method.",
            "Add the connector dependency to the build and make sure it is packaged "
            "with the application, then getConnection will find the driver.",
        ],
        fix="""<dependency>
  <groupId>com.mysql</groupId>
  <artifactId>mysql-connector-j</artifactId>
  <version>8.3.0</version>
</dependency>""",
    ),
    dict(
        exc="java.lang.IllegalArgumentException",
        headline='Exception in thread "main" java.lang.IllegalArgumentException: Illegal pattern character \'Y\'',
        frames=[
            frame("java.text", "SimpleDateFormat", "compile", "SimpleDateFormat.java:826"),
            frame("java.text", "SimpleDateFormat", "initialize", "SimpleDateFormat.java:634"),
            frame("java.text", "SimpleDateFormat", "<init>", "SimpleDateFormat.java:605"),
            frame("org.logs", "LogFormatter", "format", "LogFormatter.java:18"),
        ],
        code="""SimpleDateFormat fmt = new SimpleDateFormat("YYYY-MM-dd HH:mm");
String stamp = fmt.format(new Date());""",
        title="IllegalArgumentException Illegal pattern character in SimpleDateFormat",
        prose=[
            "Older runtimes do not support the week year letter in SimpleDateFormat "
            "patterns, so compile rejects it with IllegalArgumentException while the "
            "LogFormatter constructs the formatter.",
            "You almost certainly want the calendar year anyway. Use lowercase yyyy in "
            "the pattern, or switch to DateTimeFormatter from java.time.",
        ],
        fix="""SimpleDateFormat fmt = new SimpleDateFormat("yyyy-MM-dd HH:mm");
String stamp = fmt.format(new Date());""",
    ),
    dict(
        exc="java.lang.IllegalStateException",
        headline='Exception in thread "main" java.lang.IllegalStateException: Iterator already obtained',
        frames=[
            frame("java.nio.file", "Files$DirectoryStreamIterator", "iterator", "Files.java:112"),
            frame("com.backup", "Scanner", "countFiles", "Scanner.java:40"),
            frame("com.backup", "Scanner", "scan", "Scanner.java:21"),
        ],
        code="""DirectoryStream<Path> stream = Files.newDirectoryStream(dir);
int count = 0;
for (Path p : stream) count++;
for (Path p : stream) copy(p);""",
        title="IllegalStateException Iterator already obtained from DirectoryStream",
        prose=[
            "A DirectoryStream can be iterated only once. countFiles consumes the "
            "iterator, and the second loop asks for a new iterator from the same "
            "stream, which throws IllegalStateException.",
            "Collect the paths into a list first, or open a fresh stream with "
            "newDirectoryStream for each pass in scan.",
        ],
        fix="""List<Path> paths = new ArrayList<>();
try (DirectoryStream<Path> stream = Files.newDirectoryStream(dir)) {
    for (Path p : stream) paths.add(p);
}""",
    ),
    dict(
        exc="java.lang.UnsupportedOperationException",
        headline='Exception in thread "main" java.lang.UnsupportedOperationException',
        frames=[
            frame("java.util", "AbstractList", "add", "AbstractList.java:153"),
            frame("java.util", "AbstractList", "add", "AbstractList.java:111"),
            frame("edu.course", "Roster", "enroll", "Roster.java:28"),
        ],
        code="""List<String> students = Arrays.asList("ana", "bo", "cy");
students.add(name);""",
        title="UnsupportedOperationException when calling add on Arrays.asList",
        prose=[
            "Arrays.asList returns a fixed-size list backed by the array. Its add "
            "method is inherited from AbstractList and throws "
            "UnsupportedOperationException, which is what enroll hits.",
            "Copy the values into a real ArrayList before you add to it.",
        ],
        fix="""List<String> students = new ArrayList<>(Arrays.asList("ana", "bo", "cy"));
students.add(name);""",
    ),
    dict(
        exc="java.lang.ArithmeticException",
        headline='Exception in thread "main" java.lang.ArithmeticException: / by zero',
        frames=[
            frame("stats.core", "Summary", "mean", "Summary.java:14"),
            frame("stats.core", "Summary", "print", "Summary.java:33"),
        ],
        code="""int total = values.stream().mapToInt(Integer::intValue).sum();
int mean = total / values.size();""",
        title="ArithmeticException / by zero when computing the mean of an empty list",
        prose=[
            "Integer division by zero throws ArithmeticException. mean divides by "
            "values.size, which is zero when the list is empty.",
            "Return early for an empty list, or use average from IntStream which gives "
            "an OptionalDouble instead of dividing by zero.",
        ],
        fix="""OptionalDouble mean = values.stream().mapToInt(Integer::intValue).average();""",
    ),
    dict(
        exc="java.util.NoSuchElementException",
        headline='Exception in thread "main" java.util.NoSuchElementException',
        frames=[
            frame("java.util", "Scanner", "throwFor", "Scanner.java:937"),
            frame("java.util", "Scanner", "next", "Scanner.java:1594"),
            frame("java.util", "Scanner", "nextInt", "Scanner.java:2258"),
            frame("game.quiz", "Quiz", "askQuestion", "Quiz.java:51"),
        ],
        code="""Scanner input = new Scanner(System.in);
int answer = input.nextInt();
input.close();""",
        title="NoSuchElementException from Scanner.nextInt after closing System.in",
        prose=[
            "Closing a Scanner also closes System.in. The next askQuestion creates a new "
            "Scanner on a closed stream, so nextInt has nothing to read and throwFor "
            "raises NoSuchElementException.",
            "Create one Scanner for the whole program and never close it while you "
            "still need input, or check hasNextInt before calling nextInt.",
        ],
        fix="""private static final Scanner INPUT = new Scanner(System.in);

int answer = INPUT.hasNextInt() ? INPUT.nextInt() : -1;""",
    ),
    dict(
        exc="java.net.SocketTimeoutException",
        headline='Exception in thread "main" java.net.SocketTimeoutException: Read timed out',
        frames=[
            frame("java.net", "SocketInputStream", "socketRead0", "Native Method"),
            frame("java.net", "SocketInputStream", "read", "SocketInputStream.java:150"),
            frame("weather.client", "ForecastClient", "fetch", "ForecastClient.java:37"),
        ],
        code="""HttpURLConnection conn = (HttpURLConnection) url.openConnection();
conn.setReadTimeout(500);
InputStream body = conn.getInputStream();""",
        title="SocketTimeoutException Read timed out with HttpURLConnection",
        prose=[
            "setReadTimeout sets how long read may block waiting for data. Half a "
            "second is too short for this forecast endpoint, so socketRead0 gives up and "
            "fetch receives SocketTimeoutException.",
            "Raise the read timeout to a realistic value, and retry fetch with backoff "
            "when the server is slow.",
        ],
        fix="""HttpURLConnection conn = (HttpURLConnection) url.openConnection();
conn.setConnectTimeout(5000);
conn.setReadTimeout(15000);
InputStream body = conn.getInputStream();""",
    ),
    dict(
        exc="java.net.MalformedURLException",
        headline='Exception in thread "main" java.net.MalformedURLException: no protocol: www.example.org/api',
        frames=[
            frame("java.net", "URL", "<init>", "URL.java:611"),
            frame("java.net", "URL", "<init>", "URL.java:508"),
            frame("crawler.web", "PageFetcher", "download", "PageFetcher.java:22"),
        ],
        code="""String address = config.get("endpoint");
URL url = new URL(address);
InputStream in = url.openStream();""",
        title="MalformedURLException no protocol when building a URL",
        prose=[
            "The URL constructor needs a scheme. The endpoint value has no protocol "
            "prefix, so download fails with MalformedURLException before any request "
            "is made.",
            "Prefix the address with https, or use URI to resolve it against a base "
            "URL that already has a protocol.",
        ],
        fix="""String address = config.get("endpoint");
URL url = new URL("https://" + address);
InputStream in = url.openStream();""",
    ),
    dict(
        exc="java.lang.IndexOutOfBoundsException",
        headline='Exception in thread "main" java.lang.IndexOutOfBoundsException: Index 0 out of bounds for length 0',
        frames=[
            frame("java.util", "Objects", "checkIndex", "Objects.java:359"),
            frame("java.util", "ArrayList", "get", "ArrayList.java:427"),
            frame("music.playlist", "Player", "playFirst", "Player.java:18"),
        ],
        code="""List<Song> queue = library.search(query);
Song first = queue.get(0);
player.play(first);""",
        title="IndexOutOfBoundsException Index 0 out of bounds for length 0 on ArrayList.get",
        prose=[
            "search returned an empty list, and ArrayList.get checks the index with "
            "checkIndex before reading. Index 0 is out of bounds for length 0, so "
            "playFirst throws IndexOutOfBoundsException.",
            "Check isEmpty on the queue before calling get, and tell the user that "
            "nothing matched the query.",
        ],
        fix="""List<Song> queue = library.search(query);
if (!queue.isEmpty()) {
    player.play(queue.get(0));
}""",
    ),
    dict(
        exc="java.lang.StringIndexOutOfBoundsException",
        headline='Exception in thread "main" java.lang.StringIndexOutOfBoundsException: begin 0, end 8, length 5',
        frames=[
            frame("java.lang", "String", "checkBoundsBeginEnd", "String.java:3319"),
            frame("java.lang", "String", "substring", "String.java:1874"),
            frame("bank.ui", "AccountView", "shortId", "AccountView.java:66"),
        ],
        code="""String id = account.getId();
String label = id.substring(0, 8);""",
        title="StringIndexOutOfBoundsException begin 0, end 8, length 5 in substring",
        prose=[
            "substring requires end to be at most the length of the string. Some "
            "account ids are shorter than eight characters, so checkBoundsBeginEnd "
            "throws StringIndexOutOfBoundsException in shortId.",
            "Clamp the end index with Math.min against the id length before calling "
            "substring.",
        ],
        fix="""String id = account.getId();
String label = id.substring(0, Math.min(8, id.length()));""",
    ),
    dict(
        exc="java.lang.InterruptedException",
        headline='Exception in thread "worker-1" java.lang.InterruptedException: sleep interrupted',
        frames=[
            frame("java.lang", "Thread", "sleep", "Native Method"),
            frame("jobs.poller", "StatusPoller", "waitForCompletion", "StatusPoller.java:29"),
            frame("jobs.poller", "StatusPoller", "run", "StatusPoller.java:17"),
        ],
        code="""while (!job.isDone()) {
    Thread.sleep(1000);
}""",
        title="InterruptedException sleep interrupted in a polling worker thread",
        prose=[
            "Thread.sleep throws InterruptedException when another thread interrupts "
            "the worker, typically because the executor is shutting down. "
            "waitForCompletion lets the exception escape from run.",
            "Catch InterruptedException, restore the interrupt flag with interrupt, "
            "and leave the polling loop so the executor can stop cleanly.",
        ],
        fix="""try {
    while (!job.isDone()) {
        Thread.sleep(1000);
    }
} catch (InterruptedException e) {
    Thread.currentThread().interrupt();
}""",
    ),
    dict(
        exc="java.net.UnknownHostException",
        headline='Exception in thread "main" java.net.UnknownHostException: api.internal.local',
        frames=[
            frame("java.net", "InetAddress$CachedAddresses", "get", "InetAddress.java:797"),
            frame("java.net", "InetAddress", "getAllByName0", "InetAddress.java:1505"),
            frame("java.net", "InetAddress", "getByName", "InetAddress.java:1354"),
            frame("sync.agent", "Uploader", "resolve", "Uploader.java:45"),
        ],
        code="""InetAddress host = InetAddress.getByName(hostname);
Socket socket = new Socket(host, 443);""",
        title="UnknownHostException from InetAddress.getByName for an internal host",
        prose=[
            "getByName could not resolve the hostname through DNS. From this machine "
            "the internal name is unknown, so getAllByName0 throws "
            "UnknownHostException inside resolve.",
            "Check the resolver configuration or the hosts file, and verify the name "
            "with nslookup from the same machine before opening the Socket.",
        ],
        fix="""InetAddress host = InetAddress.getByName("api.internal.local");
System.out.println(host.getHostAddress());""",
    ),
    dict(
        exc="java.text.ParseException",
        headline='Exception in thread "main" java.text.ParseException: Unparseable date: "2024/03/01"',
        frames=[
            frame("java.text", "DateFormat", "parse", "DateFormat.java:399"),
            frame("billing.invoice", "InvoiceParser", "parseDueDate", "InvoiceParser.java:58"),
            frame("billing.invoice", "InvoiceParser", "parse", "InvoiceParser.java:24"),
        ],
        code="""DateFormat fmt = new SimpleDateFormat("yyyy-MM-dd");
Date due = fmt.parse(fields[3]);""",
        title="ParseException Unparseable date when the input uses slashes",
        prose=[
            "The pattern expects dashes but the invoice field uses slashes. "
            "DateFormat.parse cannot match the text and throws ParseException from "
            "parseDueDate.",
            "Make the pattern match the input, or normalize the separators before "
            "calling parse.",
        ],
        fix="""DateFormat fmt = new SimpleDateFormat("yyyy/MM/dd");
Date due = fmt.parse(fields[3]);""",
    ),
]

NAV = ["Home", "Questions", "Tags", "Users", "Companies", "Jobs", "Unanswered", "About", "Help", "Log in", "Sign up"]
BLOG_NAV = ["Home", "Tutorials", "Java", "Spring", "Android", "Python", "Interview Questions", "Contact", "Newsletter"]
ADS = [
    "Try our cloud IDE free for 30 days",
    "Learn Kotlin in a weekend course",
    "Hire senior developers in 48 hours",
    "Cheap hosting for your side project",
    "Get certified as a cloud architect today",
    "Build dashboards without writing code",
]
RELATED = [
    "How do I center a div horizontally and vertically",
    "What is the difference between let and var",
    "Why does my Python script run slowly on Windows",
    "How to undo the most recent local commits in Git",
    "Best way to format currency in JavaScript",
    "How to read environment variables in Node",
    "Rename a column in a pandas DataFrame",
    "Fastest way to sort a dictionary by value",
    "How to check if a string contains a substring in Bash",
    "Convert a Unix timestamp to a readable date in Go",
]
FOOTER = ["Privacy policy", "Terms of service", "Cookie settings", "Contact us", "Blog", "Careers", "Advertising"]
# Long, legitimate but off-topic prose: other answers and post excerpts.
OFF_TOPIC = [
    [
        "Before changing any code, make sure you can reproduce the problem reliably. Write "
        "down the exact steps, the input you used, and the environment the program ran in, "
        "because a bug that cannot be reproduced cannot be verified as fixed either.",
        "Next, shrink the program until the failure disappears and then add back the last "
        "piece you removed. This bisection approach works for configuration as well as for "
        "code, and it usually takes far less time than reading every line in the hope of "
        "spotting the mistake by inspection.",
        "Finally, write a small automated test that captures the scenario so that the same "
        "regression is caught in the build the next time somebody touches this part of the "
        "system. Good tests document intent better than comments do.",
    ],
    [
        "In my experience most of these problems come from the way the project is organised "
        "rather than from a single line. Keep input handling, business rules and output "
        "formatting in separate layers so that each can be reasoned about on its own and "
        "replaced without touching the others.",
        "It also pays to read the release notes of the libraries you depend on. Behaviour "
        "changes between versions are documented there, and upgrading blindly is one of the "
        "most common sources of surprising failures in production systems.",
        "Logging is your friend as well. A few well placed log statements with the values "
        "that matter will tell you much more than a debugger session that you cannot repeat "
        "on the server where the problem actually happens.",
    ],
    [
        "Version control makes experiments cheap. Create a branch for every attempt, commit "
        "small steps with clear messages, and do not be afraid to throw a branch away when "
        "the idea does not work out, because the history keeps everything you learned.",
        "Code review catches a surprising number of defects before they reach users. Ask a "
        "colleague to read the change with fresh eyes, explain your reasoning out loud, and "
        "you will often find the flaw yourself halfway through the explanation.",
        "Continuous integration closes the loop by running the whole suite on every push, "
        "so a broken build is noticed within minutes instead of days.",
    ],
    [
        "Performance questions deserve measurements rather than guesses. Profile the real "
        "workload, look at where the time actually goes, and only then decide what to "
        "optimise, since intuition about hot spots is wrong more often than not.",
        "Memory usage follows the same rule. Heap dumps and allocation profiles show which "
        "objects dominate, and the answer is frequently a cache that was never bounded or a "
        "collection that keeps growing for the whole lifetime of the process.",
        "Once the bottleneck is known, prefer simple algorithmic improvements over clever "
        "micro optimisations that make the code harder to maintain.",
    ],
]

CHATTER = [
    "Thanks for reading! If this article helped you, share it with your colleagues.",
    "Posted in programming tips. Subscribe to get weekly articles in your inbox.",
    "This site uses cookies to improve your experience and to show relevant ads.",
]


def esc(s):
    return html.escape(s, quote=False)


def links(items, rng, base="/"):
    return "".join(f'<li><a href="{base}{rng.randrange(10000)}">{esc(t)}</a></li>' for t in items)


def trace_text(case):
    return "\n".join([case["headline"], *case["frames"]])


def relevant_section(case, rng, tag, cls):
    """Returns (html, gold_text) for the planted section."""
    parts = []
    gold = []
    first, second = case["prose"]
    parts.append(f"<p>{esc(first)}</p>")
    gold.append(first)
    if rng.random() < 0.5:
        # Quote the trace, then show the fix.
        parts.append(f"<pre><code>{esc(trace_text(case))}</code></pre>")
        gold.append(trace_text(case))
    parts.append(f"<p>{esc(second)}</p>")
    gold.append(second)
    parts.append(f"<pre><code>{esc(case['fix'])}</code></pre>")
    gold.append(case["fix"])
    return f'<{tag} class="{cls}">{"".join(parts)}</{tag}>', "\n\n".join(gold)


SHORT_REPLIES = [
    "Same problem here, did you ever find a fix?",
    "Works on my machine. Which version are you using?",
    "Have you tried cleaning and rebuilding the project?",
    "Please post the full code, this is impossible to answer as is.",
]


def off_topic(rng):
    """Competing prose: either long and dense or a short reply."""
    if rng.random() < 0.5:
        return rng.choice(OFF_TOPIC)[: rng.randint(1, 3)]
    return [rng.choice(SHORT_REPLIES)]


def other_answer(rng):
    paras = "".join(f"<p>{esc(p)}</p>" for p in off_topic(rng))
    return (
        f'<div class="answer"><div class="votecell"><span class="vote-count">{rng.randrange(0, 40)}</span> '
        f'<a href="/vote/up">up</a> <a href="/vote/down">down</a></div>'
        f'<div class="answer-body">{paras}</div>'
        f'<div class="post-menu"><a href="/share">share</a> <a href="/follow">follow</a></div></div>'
    )


def so_page(case, rng):
    section, gold = relevant_section(case, rng, "div", "answer-body")
    other = other_answer(rng)
    other_before, other_after = (other, "") if rng.random() < 0.5 else ("", other)
    votes = rng.randrange(3, 400)
    related = rng.sample(RELATED, 6)
    ads = rng.sample(ADS, 2)
    html_doc = f"""<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>{esc(case['title'])} - Stack Overflow</title>
<script>window.analytics = {{ page: "question" }};</script>
<style>body {{ font-family: sans-serif; }}</style>
</head>
<body>
<header class="top-bar"><nav><ul>{links(NAV, rng)}</ul></nav></header>
<div id="content">
  <div id="question-header"><h1><a href="/questions/{rng.randrange(10**7)}">{esc(case['title'])}</a></h1></div>
  <div id="answers">
    {other_before}
    <div class="answer accepted">
      <div class="votecell"><span class="vote-count">{votes}</span> <a href="/vote/up">up</a> <a href="/vote/down">down</a></div>
      {section}
      <div class="post-menu"><a href="/share">share</a> <a href="/edit">improve this answer</a> <a href="/follow">follow</a></div>
    </div>
    {other_after}
  </div>
</div>
<div id="sidebar">
  <div class="ad"><a href="/ads/1">{esc(ads[0])}</a></div>
  <div class="related"><h4>Related</h4><ul>{links(related, rng, "/questions/")}</ul></div>
  <div class="ad"><a href="/ads/2">{esc(ads[1])}</a></div>
</div>
<footer><ul>{links(FOOTER, rng)}</ul><p>Site design / logo 2024. User contributions licensed under CC BY-SA.</p></footer>
</body>
</html>
"""
    return html_doc, gold


def blog_page(case, rng):
    section, gold = relevant_section(case, rng, "div", "entry-content")
    excerpt = "".join(f"<p>{esc(p)}</p>" for p in off_topic(rng))
    ads = rng.sample(ADS, 3)
    related = rng.sample(RELATED, 5)
    html_doc = f"""<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>{esc(case['title'])} | CodeNotes</title>
<script src="/static/tracker.js"></script>
</head>
<body>
<div class="site-header"><a class="logo" href="/">CodeNotes</a><ul class="menu">{links(BLOG_NAV, rng)}</ul></div>
<div class="banner-ad"><a href="/ads/top">{esc(ads[0])}</a> <a href="/ads/top2">{esc(ads[1])}</a></div>
<div class="wrapper">
  <div class="post">
    <h2 class="entry-title"><a href="/posts/{rng.randrange(10**5)}">{esc(case['title'])}</a></h2>
    <div class="entry-meta">Posted by <a href="/authors/{rng.randrange(100)}">admin</a> in <a href="/cat/java">Java</a></div>
    {section}
    <div class="share"><a href="/share/tw">Tweet</a> <a href="/share/fb">Share</a> <a href="/share/in">Post</a></div>
  </div>
  <div class="comments"><p>{esc(rng.choice(CHATTER))}</p></div>
  <div class="more-posts"><h3>From the archive</h3><div class="excerpt">{excerpt}</div></div>
</div>
<div class="sidebar"><h3>Popular posts</h3><ul>{links(related, rng, "/posts/")}</ul><div class="ad"><a href="/ads/side">{esc(ads[2])}</a></div></div>
<div class="site-footer"><ul>{links(FOOTER, rng)}</ul><p>{esc(CHATTER[2])}</p></div>
</body>
</html>
"""
    return html_doc, gold


def main():
    rng = random.Random(SEED)
    if OUT.exists():
        shutil.rmtree(OUT)
    for i, case in enumerate(CASES):
        group = "so" if i % 2 == 0 else "non-so"
        page, gold = (so_page if group == "so" else blog_page)(case, rng)
        d = OUT / f"case{i + 1:02d}"
        d.mkdir(parents=True)
        (d / "page.html").write_text(page)
        (d / "gold.txt").write_text(gold + "\n")
        ctx = {"trace": trace_text(case), "code": case["code"]}
        (d / "context.json").write_text(json.dumps(ctx, indent=2) + "\n")
        (d / "meta.json").write_text(json.dumps({"group": group}) + "\n")


if __name__ == "__main__":
    main()
