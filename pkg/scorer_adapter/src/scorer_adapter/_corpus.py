"""Embedded training text for the built-in bigram language model.

Plain everyday English with high coverage of common function-word bigrams.
The model version is derived from a hash of this text, so any edit here
bumps the version recorded in score files.
"""

SENTENCES = (
    "the cat sat on the mat",
    "the dog slept under the table",
    "she opened the door and walked into the room",
    "he closed the window because the wind was cold",
    "the children played in the park all afternoon",
    "we went to the market to buy fresh bread",
    "the train arrived at the station ten minutes late",
    "a small bird landed on the branch outside my window",
    "the sun rose over the hills and the sky turned orange",
    "it rained all night and the streets were wet in the morning",
    "the old man told a long story about his youth",
    "my sister works at the hospital in the city",
    "the students read the book before the lecture",
    "the teacher wrote the answer on the board",
    "they drove along the coast until the road ended",
    "the coffee was too hot so she waited for it to cool",
    "he put the keys on the shelf near the door",
    "the garden was full of flowers in the spring",
    "the river flows through the middle of the town",
    "we watched the movie and then walked home",
    "the bridge over the river was built a hundred years ago",
    "she wrote a letter to her friend in another country",
    "the store closes at nine in the evening",
    "a loud noise woke the baby in the middle of the night",
    "the farmer planted corn in the field behind the barn",
    "the boy kicked the ball over the fence",
    "the team won the game in the final minute",
    "the plane landed safely despite the storm",
    "the library was quiet except for the sound of pages turning",
    "he fixed the broken chair with a few nails",
    "the soup needs more salt and a little pepper",
    "the meeting started late because the manager was stuck in traffic",
    "she found her lost ring under the bed",
    "the mountain was covered with snow all winter",
    "the ship sailed across the sea for many weeks",
    "the price of fruit went up again this year",
    "he turned off the lights and went to sleep",
    "the new restaurant on the corner serves very good food",
    "the doctor told him to rest for a few days",
    "the news spread quickly through the small village",
    "the committee will meet again next week to discuss the plan",
    "the report shows that sales increased during the summer",
    "the company opened a new office in the capital",
    "the government announced a new policy on energy",
    "the weather forecast says it will snow tomorrow",
    "the museum has a large collection of old paintings",
    "the workers finished the building ahead of schedule",
    "the election results were announced late in the evening",
    "scientists discovered a new species of frog in the forest",
    "the city council approved the budget for next year",
    "the book was translated into many languages",
    "the bank raised interest rates for the second time",
    "the festival attracts thousands of visitors every summer",
    "the road was closed for repairs over the weekend",
    "the school added new classes in art and music",
    "the mayor gave a speech about the future of the city",
    "the police asked the public for information about the case",
    "the fire was put out before it reached the houses",
    "the study found that people sleep less than they used to",
    "the crowd cheered when the singer came on stage",
    "i went to the store to buy some milk",
    "i think the answer is somewhere in the middle",
    "you can leave your coat on the chair by the door",
    "we should talk about this before the meeting",
    "they said the show starts at eight",
    "i do not know where the time goes",
    "that was the best meal i have had in a long time",
    "can you tell me how to get to the station",
    "it is hard to say what will happen next",
    "she asked me to call her when i got home",
    "he said he would be there in five minutes",
    "we have been waiting for the bus for half an hour",
    "there is a lot of work to do before friday",
    "this is the first time i have seen the ocean",
    "the kids want to go to the beach this weekend",
    "i left my phone at home this morning",
    "do you want tea or coffee with your breakfast",
    "the movie was longer than i expected",
    "we talked for hours about everything and nothing",
    "it was a long day and everyone was tired",
    "my neighbor helped me carry the boxes up the stairs",
    "the recipe calls for two eggs and a cup of flour",
    "the trail leads to a small lake in the hills",
    "the hotel room had a view of the harbor",
    "the summary leaves out the most important detail",
    "the article describes the events of that day",
    "the author explains the idea with a simple example",
    "the first chapter introduces the main character",
    "the story takes place in a small town by the sea",
    "the results of the experiment were hard to explain",
    "the machine makes a strange sound when it starts",
    "the bottle was empty by the end of the night",
    "the letter arrived two weeks after it was sent",
    "the answer to the question was not in the book",
    "the picture on the wall was painted by her grandfather",
    "the music was so loud that we could not talk",
    "the cake was gone before the party even started",
    "the snow melted quickly in the warm sun",
    "the value of the house doubled in ten years",
    "the tree fell across the road during the storm",
    "the glass broke when it hit the floor",
    "the clock on the tower stopped at noon",
    "the food at the party was better than expected",
    "the last bus leaves at midnight",
    "a man walked into the shop and asked for directions",
    "the woman at the desk answered all our questions",
    "the child drew a picture of a house and a tree",
    "the driver stopped the car at the red light",
    "the waiter brought the wrong order twice",
    "the engineer checked the bridge for cracks",
    "the pilot spoke to the passengers before takeoff",
    "the singer thanked the crowd at the end of the show",
    "the artist spent a year on the painting",
    "the runner crossed the line just before the rain started",
    "the judge asked the witness to repeat the answer",
    "the cook added the onions to the pan",
    "the nurse checked on the patient every hour",
    "the guard opened the gate at sunrise",
    "people say the winters here used to be colder",
    "most of the shops on this street close early on sunday",
    "some of the students finished the test in an hour",
    "many people watched the game at home",
    "a few of the letters were never delivered",
    "everyone in the room heard the announcement",
    "nobody knew the answer to the last question",
    "someone left a bag on the seat of the train",
    "each of the rooms has its own key",
    "both of the brothers work on the farm",
    "half of the class was absent on monday",
    "all of the tickets were sold in one day",
    "the first part of the plan worked well",
    "the rest of the money went to charity",
    "the end of the film surprised everyone",
    "the top of the mountain was hidden by clouds",
    "the back of the house faces the garden",
    "the middle of the week is always busy",
    "the side of the road was lined with trees",
    "the front of the store was painted blue",
    "the start of the season brought warmer weather",
    "the edge of the forest was dark and quiet",
    "he works during the day and studies at night",
    "she sings in the choir on sundays",
    "they live near the school on the hill",
    "we meet for lunch once a month",
    "i run along the river every morning",
    "you learn something new every day",
    "the phone rang three times before she answered",
    "the door opened slowly and a cold draft came in",
    "the lights went out during the storm",
    "the water in the lake was clear and cold",
    "the bread in the oven smelled wonderful",
    "the flowers on the table were from the garden",
    "the painting in the hall is worth a fortune",
    "the fruit from the market was sweet and ripe",
    "the smoke from the fire could be seen for miles",
    "the path through the woods was covered with leaves",
    "the view from the top was worth the climb",
    "the sound of the sea put the children to sleep",
    "after the rain the air smelled fresh and clean",
    "before the show we had dinner at a small place nearby",
    "during the summer the days are long and warm",
    "since the move she has been much happier",
    "until the end of the month the museum is free",
    "without a map we would have been lost",
    "within a year the town had changed completely",
    "in the morning the streets are almost empty",
    "at the end of the day we counted the money",
    "on the way home we stopped for ice cream",
    "by the time we arrived the food was cold",
    "over the years the garden grew wild",
    "under the old bridge the water runs fast",
    "behind the house there is a small orchard",
    "between the two villages there is only one road",
    "the report was finished on time",
    "the plan sounded good but it cost too much",
    "the test was easier than the one last year",
    "the job requires patience and a steady hand",
    "the trip took longer than we had planned",
    "the answer came to him in the middle of the night",
    "the problem with the engine was easy to fix",
    "the reason for the delay was never explained",
    "the idea behind the project is very simple",
    "the result of the vote was close",
    "the cost of living keeps going up",
    "the number of visitors doubled over the weekend",
    "the quality of the work speaks for itself",
    "the size of the crowd surprised the organizers",
    "the color of the sky changed as the sun set",
    "the shape of the old coin was worn smooth",
    "the taste of the soup reminded her of home",
    "the smell of fresh paint filled the room",
    "the weight of the bag made the walk harder",
    "the length of the meeting tested everyone",
    "he read the paper while he ate his breakfast",
    "she hummed a song as she worked in the kitchen",
    "they laughed at the joke even though it was old",
    "we waited in line for almost an hour",
    "i wrote down the address so i would not forget it",
    "you can see the lighthouse from the end of the pier",
    "the dog barked at the mailman again",
    "the cattle grazed in the field near the river",
    "the bees were busy among the flowers",
    "the horse drank from the stream by the fence",
    "the ducks crossed the road one by one",
    "the fish in the pond come to the surface at dusk",
)

CORPUS_TEXT = "\n".join(SENTENCES)
